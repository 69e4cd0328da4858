#!/usr/bin/env python3
"""Regenerate the committed deterministic test images in data/.

Everything is procedural (no downloads), so the corpus is reproducible
byte for byte: run `python3 scripts/make_test_images.py` from the repo
root and commit the results.
"""

from pathlib import Path

import numpy as np

from rydberg_ofdm.images import save_image

SIZE = 256
OUT = Path(__file__).resolve().parent.parent / "data"


def _grid():
    axis = np.linspace(-1.0, 1.0, SIZE)
    return np.meshgrid(axis, axis)


def _soft_ellipse(xx, yy, cx, cy, rx, ry, sharpness=40.0):
    """Mask that is ~1 inside the ellipse and rolls off smoothly outside."""
    r = ((xx - cx) / rx) ** 2 + ((yy - cy) / ry) ** 2
    return 1.0 / (1.0 + np.exp(np.clip(sharpness * (r - 1.0), -60.0, 60.0)))


def _mottle(rng, scale, sigma):
    """Smooth low-frequency noise field, upsampled from a coarse grid."""
    coarse = rng.normal(0.0, sigma, (scale, scale))
    idx = np.linspace(0, scale - 1, SIZE)
    i0 = np.floor(idx).astype(int)
    i1 = np.minimum(i0 + 1, scale - 1)
    frac = idx - i0
    rows = (coarse[i0] * (1 - frac)[:, None] + coarse[i1] * frac[:, None])
    cols = (rows[:, i0] * (1 - frac)[None, :] + rows[:, i1] * frac[None, :])
    return cols


def portrait():
    """Procedural head-and-shoulders portrait with film-like grain."""
    xx, yy = _grid()
    rng = np.random.Generator(np.random.PCG64(20240601))

    backdrop = 95.0 + 40.0 * (yy + 1.0) / 2.0
    backdrop += 18.0 * np.exp(-((xx + 0.7) ** 2 + (yy + 0.7) ** 2) / 0.9)
    backdrop += 9.0 * np.sin(14.0 * xx + 5.0 * yy) * np.sin(11.0 * yy - 3.0)
    image = backdrop

    shoulders = _soft_ellipse(xx, yy, 0.0, 1.25, 0.85, 0.75, sharpness=25.0)
    shirt = 70.0 + 25.0 * (xx + 1.0) / 2.0
    shirt += 11.0 * np.sin(60.0 * xx) * np.sin(55.0 * yy + 1.0)
    image = image * (1 - shoulders) + shirt * shoulders

    neck = _soft_ellipse(xx, yy, 0.0, 0.55, 0.16, 0.35, sharpness=30.0)
    image = image * (1 - neck) + 176.0 * neck

    face = _soft_ellipse(xx, yy, 0.0, -0.05, 0.52, 0.66, sharpness=30.0)
    skin = 190.0 - 35.0 * np.sqrt(
        np.clip((xx / 0.52) ** 2 + ((yy + 0.05) / 0.66) ** 2, 0, 1)
    )
    skin += 12.0 * xx
    image = image * (1 - face) + skin * face

    hair = _soft_ellipse(xx, yy, 0.0, -0.42, 0.58, 0.46, sharpness=28.0)
    hair *= 1.0 - _soft_ellipse(xx, yy, 0.0, 0.02, 0.46, 0.52, sharpness=28.0)
    hair_tone = 55.0 + 22.0 * np.abs(np.sin(40.0 * xx + 3.0 * yy))
    image = image * (1 - hair) + hair_tone * hair

    for sx in (-0.2, 0.2):
        socket = np.exp(-(((xx - sx) / 0.11) ** 2 +
                          ((yy + 0.16) / 0.055) ** 2))
        image -= 60.0 * socket
        pupil = np.exp(-(((xx - sx) / 0.035) ** 2 +
                         ((yy + 0.16) / 0.035) ** 2))
        image -= 70.0 * pupil

    nose = np.exp(-((xx / 0.05) ** 2 + ((yy - 0.08) / 0.14) ** 2))
    image -= 18.0 * nose
    mouth = np.exp(-((xx / 0.17) ** 2 + ((yy - 0.3) / 0.045) ** 2))
    image -= 45.0 * mouth

    image += _mottle(rng, 32, 6.0)
    image += rng.normal(0.0, 7.0, image.shape)
    return np.clip(np.rint(image), 0, 255).astype(np.uint8)


def gradient():
    xx, yy = _grid()
    image = 127.5 + 90.0 * np.sin(1.4 * xx + 0.9 * yy) * np.cos(0.7 * yy)
    return np.clip(np.rint(image), 0, 255).astype(np.uint8)


def checker():
    tile = np.indices((SIZE, SIZE)).sum(axis=0) // 16 % 2
    return (40 + 175 * tile).astype(np.uint8)


def texture():
    rng = np.random.Generator(np.random.PCG64(77))
    image = rng.integers(0, 256, size=(SIZE, SIZE))
    return image.astype(np.uint8)


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for name, build in (
        ("portrait", portrait),
        ("gradient", gradient),
        ("checker", checker),
        ("texture", texture),
    ):
        path = OUT / f"{name}.pgm"
        save_image(path, build())
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
