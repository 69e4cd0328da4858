"""8-bit PGM/PPM image IO and full-reference quality metrics."""

import math

import numpy as np

from .errors import FramingError

__all__ = [
    "load_image",
    "psnr",
    "save_image",
    "ssim",
    "to_gray",
]

_SSIM_WINDOW = 8
_SSIM_C1 = (0.01 * 255.0) ** 2
_SSIM_C2 = (0.03 * 255.0) ** 2


def _read_tokens(data, count):
    """Pull `count` whitespace-separated header tokens, skipping # comments.

    Returns the tokens and the offset of the single whitespace byte that
    terminates the last one, per the netpbm convention.
    """
    tokens = []
    pos = 0
    while len(tokens) < count:
        if pos >= len(data):
            raise FramingError("truncated netpbm header")
        ch = data[pos:pos + 1]
        if ch in b" \t\r\n":
            pos += 1
            continue
        if ch == b"#":
            end = data.find(b"\n", pos)
            if end < 0:
                raise FramingError("unterminated comment in netpbm header")
            pos = end + 1
            continue
        start = pos
        while pos < len(data) and data[pos:pos + 1] not in b" \t\r\n":
            pos += 1
        tokens.append(data[start:pos])
    if pos >= len(data):
        raise FramingError("netpbm header not followed by pixel data")
    return tokens, pos + 1


def load_image(path):
    """Read a binary PGM (P5) or PPM (P6) file.

    Returns a uint8 array, shape (h, w) for PGM or (h, w, 3) for PPM.
    """
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:2] == b"P5":
        channels = 1
    elif data[:2] == b"P6":
        channels = 3
    else:
        raise FramingError(f"unsupported netpbm magic: {data[:2]!r}")
    tokens, offset = _read_tokens(data, 4)
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError as exc:
        raise FramingError("non-numeric netpbm header field") from exc
    if maxval != 255:
        raise FramingError(f"only 8-bit images are supported, maxval={maxval}")
    if width <= 0 or height <= 0:
        raise FramingError("netpbm dimensions must be positive")
    need = width * height * channels
    payload = data[offset:offset + need]
    if len(payload) != need:
        raise FramingError(
            f"netpbm payload is {len(payload)} bytes, expected {need}"
        )
    pixels = np.frombuffer(payload, dtype=np.uint8)
    if channels == 1:
        return pixels.reshape(height, width).copy()
    return pixels.reshape(height, width, 3).copy()


def save_image(path, pixels):
    """Write a uint8 array as binary PGM (2-D) or PPM (h, w, 3)."""
    pixels = np.asarray(pixels)
    if pixels.dtype != np.uint8:
        raise ValueError("image must be uint8")
    if pixels.ndim == 2:
        magic = b"P5"
    elif pixels.ndim == 3 and pixels.shape[2] == 3:
        magic = b"P6"
    else:
        raise ValueError(f"unsupported image shape {pixels.shape}")
    height, width = pixels.shape[:2]
    with open(path, "wb") as fh:
        fh.write(magic + b"\n%d %d\n255\n" % (width, height))
        fh.write(np.ascontiguousarray(pixels).tobytes())


def to_gray(image):
    """Collapse an RGB image to luma by averaging the channels.

    Grayscale input passes through unchanged. Output is float64.
    """
    image = np.asarray(image, dtype=np.float64)
    if image.ndim == 2:
        return image
    if image.ndim == 3 and image.shape[2] == 3:
        return image.mean(axis=2)
    raise ValueError(f"unsupported image shape {image.shape}")


def _as_pair(reference, test):
    a = np.asarray(reference, dtype=np.float64)
    b = np.asarray(test, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return a, b


def psnr(reference, test, peak=255.0):
    """Peak signal-to-noise ratio in dB; +inf for identical images."""
    a, b = _as_pair(reference, test)
    mse = np.mean((a - b) ** 2)
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(peak * peak / mse)


def _window_means(values, w):
    """Mean of every w-by-w window (valid positions), via an integral image."""
    padded = np.zeros((values.shape[0] + 1, values.shape[1] + 1))
    np.cumsum(values, axis=0, out=padded[1:, 1:])
    np.cumsum(padded[1:, 1:], axis=1, out=padded[1:, 1:])
    sums = (
        padded[w:, w:] - padded[:-w, w:] - padded[w:, :-w] + padded[:-w, :-w]
    )
    return sums / (w * w)


def ssim(reference, test):
    """Mean structural similarity over uniform 8x8 windows.

    RGB inputs are collapsed to luma first. Images smaller than the window
    raise ValueError.
    """
    a, b = _as_pair(to_gray(reference), to_gray(test))
    w = _SSIM_WINDOW
    if a.shape[0] < w or a.shape[1] < w:
        raise ValueError(
            f"image {a.shape} is smaller than the {w}x{w} SSIM window"
        )
    mu_a = _window_means(a, w)
    mu_b = _window_means(b, w)
    var_a = _window_means(a * a, w) - mu_a * mu_a
    var_b = _window_means(b * b, w) - mu_b * mu_b
    cov = _window_means(a * b, w) - mu_a * mu_b
    # Integral-image cancellation can leave tiny negative variances.
    var_a = np.maximum(var_a, 0.0)
    var_b = np.maximum(var_b, 0.0)
    num = (2.0 * mu_a * mu_b + _SSIM_C1) * (2.0 * cov + _SSIM_C2)
    den = (mu_a**2 + mu_b**2 + _SSIM_C1) * (var_a + var_b + _SSIM_C2)
    return float(np.mean(num / den))
