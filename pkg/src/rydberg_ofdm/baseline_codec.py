"""Fixed-rate reference image codec: 8x8 DCT, uniform quantizer, 3x repetition.

Every coefficient is carried as a 9-bit two's-complement word, so the bit
budget is exactly 27 bits per pixel regardless of content. There is no
entropy coding; the stream stays fixed-length so transport accounting is
trivial and bit errors cannot desynchronize the decoder.
"""

import numpy as np
from scipy.fft import dctn, idctn

from .errors import CodecError

__all__ = [
    "BLOCK",
    "BITS_PER_COEFF",
    "REPEAT",
    "baseline_bits_per_image",
    "baseline_decode",
    "baseline_encode",
]

BLOCK = 8
BITS_PER_COEFF = 9
REPEAT = 3
_COEF_LIMIT = 255
_DEFAULT_STEP = 8.0


def baseline_bits_per_image(width, height):
    """Exact stream length the codec produces for one grayscale image."""
    _check_dims(height, width)
    return width * height * BITS_PER_COEFF * REPEAT


def _check_dims(height, width):
    if height <= 0 or width <= 0:
        raise CodecError("image dimensions must be positive")
    if height % BLOCK or width % BLOCK:
        raise CodecError(
            f"image dimensions must be multiples of {BLOCK}, got "
            f"{width}x{height}"
        )


def _to_blocks(values):
    h, w = values.shape
    return (
        values.reshape(h // BLOCK, BLOCK, w // BLOCK, BLOCK)
        .transpose(0, 2, 1, 3)
        .reshape(-1, BLOCK, BLOCK)
    )


def _from_blocks(blocks, height, width):
    return (
        blocks.reshape(height // BLOCK, width // BLOCK, BLOCK, BLOCK)
        .transpose(0, 2, 1, 3)
        .reshape(height, width)
    )


def baseline_encode(image, step=_DEFAULT_STEP):
    """Encode a grayscale uint8 image to a 0/1 bit array."""
    image = np.asarray(image)
    if image.ndim != 2:
        raise CodecError("baseline codec takes a single-channel image")
    if step <= 0:
        raise CodecError("quantizer step must be positive")
    _check_dims(*image.shape)
    centered = image.astype(np.float64) - 128.0
    coefs = dctn(_to_blocks(centered), axes=(1, 2), norm="ortho")
    quant = np.rint(coefs / step).astype(np.int64)
    np.clip(quant, -_COEF_LIMIT, _COEF_LIMIT, out=quant)
    words = (quant.reshape(-1) & ((1 << BITS_PER_COEFF) - 1)).astype(np.uint16)
    shifts = np.arange(BITS_PER_COEFF - 1, -1, -1, dtype=np.uint16)
    bits = ((words[:, None] >> shifts[None, :]) & 1).astype(np.uint8)
    return np.repeat(bits.reshape(-1), REPEAT)


def baseline_decode(bits, width, height, step=_DEFAULT_STEP):
    """Decode a bit array back to a grayscale uint8 image.

    A wrong-length stream raises CodecError; corrupted bits never do. Each
    bit is majority-voted across its three copies, so the decoder always
    produces an image of the declared size.
    """
    if step <= 0:
        raise CodecError("quantizer step must be positive")
    _check_dims(height, width)
    bits = np.asarray(bits).astype(np.int64, copy=False)
    expected = baseline_bits_per_image(width, height)
    if bits.size != expected:
        raise CodecError(
            f"stream holds {bits.size} bits, expected {expected}"
        )
    voted = bits.reshape(-1, REPEAT).sum(axis=1) >= (REPEAT + 1) // 2
    words = voted.reshape(-1, BITS_PER_COEFF)
    shifts = np.arange(BITS_PER_COEFF - 1, -1, -1)
    raw = (words.astype(np.int64) << shifts[None, :]).sum(axis=1)
    signed = np.where(raw >= 1 << (BITS_PER_COEFF - 1),
                      raw - (1 << BITS_PER_COEFF), raw)
    coefs = signed.reshape(-1, BLOCK, BLOCK).astype(np.float64) * step
    blocks = idctn(coefs, axes=(1, 2), norm="ortho") + 128.0
    pixels = np.clip(np.rint(_from_blocks(blocks, height, width)), 0, 255)
    return pixels.astype(np.uint8)
