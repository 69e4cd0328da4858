#!/usr/bin/env python3
"""Regenerate test/golden/ from the Python reference implementation.

The fixture images under test/golden/ are products of the TypeScript
dataset generator (checked in so this script does not need node).  For
each image the Python package computes baseline codec bit streams,
round trips, and metric values; the TypeScript tests then assert that
this implementation reproduces them.

Usage: python3 scripts/make_goldens.py
"""

import hashlib
import json
import pathlib
import sys

import numpy as np

ROOT = pathlib.Path(__file__).resolve().parents[2]
sys.path.insert(0, str(ROOT / "src"))

from rydberg_ofdm.baseline_codec import (  # noqa: E402
    baseline_bits_per_image,
    baseline_decode,
    baseline_encode,
)
from rydberg_ofdm.images import load_image, psnr, ssim  # noqa: E402

GOLDEN_DIR = pathlib.Path(__file__).resolve().parents[1] / "test" / "golden"


def digest(array) -> str:
    return hashlib.sha256(array.tobytes()).hexdigest()


def main() -> int:
    images = sorted(GOLDEN_DIR.glob("img_*.pgm"))
    if not images:
        print(f"no fixture images in {GOLDEN_DIR}", file=sys.stderr)
        return 1
    record = {"schema_version": 1, "images": {}, "pairs": []}
    pixels = {}
    for path in images:
        img = load_image(path)
        pixels[path.name] = img
        bits = baseline_encode(img)
        rec = baseline_decode(bits, width=img.shape[1], height=img.shape[0])
        packed = np.packbits(bits.astype(np.uint8))
        (GOLDEN_DIR / f"{path.stem}.baseline.bits").write_bytes(packed.tobytes())
        record["images"][path.name] = {
            "width": int(img.shape[1]),
            "height": int(img.shape[0]),
            "pixels_sha256": digest(img),
            "baseline_bits": int(bits.size),
            "baseline_bits_sha256": digest(bits),
            "baseline_roundtrip_sha256": digest(rec),
            "baseline_roundtrip_psnr_db": psnr(img, rec),
            "baseline_roundtrip_ssim": ssim(img, rec),
        }
        assert bits.size == baseline_bits_per_image(
            width=img.shape[1], height=img.shape[0])
    names = [p.name for p in images]
    for i in range(len(names)):
        for j in range(i + 1, len(names)):
            a, b = pixels[names[i]], pixels[names[j]]
            record["pairs"].append({
                "a": names[i],
                "b": names[j],
                "psnr_db": psnr(a, b),
                "ssim": ssim(a, b),
            })
    out = GOLDEN_DIR / "golden.json"
    out.write_text(json.dumps(record, indent=2, sort_keys=True) + "\n",
                   encoding="ascii")
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
