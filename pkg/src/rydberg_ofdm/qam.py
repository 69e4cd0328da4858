"""Gray-coded square QAM mapping and hard-decision demapping."""

import math

import numpy as np

from .kernels import qam_hard_demap

__all__ = ["bits_per_symbol", "constellation", "qam_demap", "qam_map"]

_ORDERS = (4, 16, 64)
_CACHE = {}


def bits_per_symbol(order):
    if order not in _ORDERS:
        raise ValueError(f"qam order must be one of {_ORDERS}, got {order}")
    return int(math.log2(order))


def _gray_decode(v):
    v = v ^ (v >> 1)
    v = v ^ (v >> 2)
    return v ^ (v >> 4)


def _axis_amplitudes(levels):
    """Amplitude for each axis bit pattern; Gray neighbors sit adjacent."""
    patterns = np.arange(levels)
    rank = _gray_decode(patterns)
    return (levels - 1) - 2 * rank


def constellation(order):
    """Unit-average-energy constellation indexed by the symbol's bit value.

    The first half of a symbol's bits selects the in-phase level, the second
    half the quadrature level, most significant bit first on each axis.
    """
    if order in _CACHE:
        return _CACHE[order]
    m = bits_per_symbol(order)
    levels = 1 << (m // 2)
    amps = _axis_amplitudes(levels)
    scale = 1.0 / math.sqrt(2 * (levels * levels - 1) / 3)
    i_part = np.repeat(amps, levels)
    q_part = np.tile(amps, levels)
    points = scale * (i_part + 1j * q_part)
    points.setflags(write=False)
    _CACHE[order] = points
    return points


def _bit_matrix(bits, width):
    bits = np.asarray(bits)
    if bits.ndim != 1 or bits.size % width != 0:
        raise ValueError(f"bit count {bits.size} is not a multiple of {width}")
    if bits.size and (bits.min() < 0 or bits.max() > 1):
        raise ValueError("bits must be 0 or 1")
    return bits.reshape(-1, width).astype(np.int64)


def qam_map(bits, order):
    """Map a flat 0/1 array to complex symbols, first bits first."""
    m = bits_per_symbol(order)
    mat = _bit_matrix(bits, m)
    weights = 1 << np.arange(m - 1, -1, -1, dtype=np.int64)
    values = mat @ weights
    return constellation(order)[values]


def qam_demap(symbols, order):
    """Hard-decide symbols to bits; boundary ties go to the lower bit value."""
    m = bits_per_symbol(order)
    points = constellation(order)
    symbols = np.asarray(symbols, dtype=np.complex128)
    idx = qam_hard_demap(np.ascontiguousarray(symbols.real),
                         np.ascontiguousarray(symbols.imag),
                         np.ascontiguousarray(points.real),
                         np.ascontiguousarray(points.imag))
    shifts = np.arange(m - 1, -1, -1, dtype=np.int64)
    bits = (idx[:, None] >> shifts[None, :]) & 1
    return bits.reshape(-1).astype(np.uint8)
