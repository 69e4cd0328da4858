"""Receive path: demodulation, channel estimation, equalization, BER.

Inverts the transmit pipeline under ideal frame timing: bias removal, CP
stripping, forward FFT with image-band rejection, pilot-based least-squares
channel estimation, zero-forcing equalization, and hard QAM demapping.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegeneratePilotError, FramingError
from .qam import qam_demap
from .waveform import BlockPilots, CombPilots, SubcarrierGrid, pilot_mask, pilot_values

__all__ = [
    "BerReport",
    "ChannelEstimate",
    "EqualizeResult",
    "ber",
    "demap_grids",
    "demodulate",
    "ls_estimate",
    "zf_equalize",
]

DEGENERATE_GAIN = 1e-9
DEGENERATE_PILOT = 1e-12


@dataclass(frozen=True)
class ChannelEstimate:
    """Per-usable-bin complex gains estimated from one symbol's pilots."""

    gains: np.ndarray
    source_scheme: object
    symbol_index: int

    def __post_init__(self):
        gains = np.asarray(self.gains, dtype=np.complex128)
        object.__setattr__(self, "gains", gains)
        if gains.ndim != 1:
            raise ValueError("gains must be one-dimensional")
        if not np.all(np.isfinite(gains)):
            raise ValueError("gains must be finite")


@dataclass(frozen=True)
class EqualizeResult:
    """Equalized data-bin symbols plus the count of erased degenerate bins."""

    symbols: np.ndarray
    degenerate_bins: int


@dataclass(frozen=True)
class BerReport:
    """Bit-error tally for one measurement run."""

    bit_errors: int
    bits_total: int
    ber: float
    config_summary: dict = field(default_factory=dict)
    seed: int | None = None
    degenerate_bins: int = 0

    def __post_init__(self):
        if self.bits_total <= 0:
            raise ValueError("bits_total must be positive")
        if not 0 <= self.bit_errors <= self.bits_total:
            raise ValueError("bit_errors out of range")

    def to_json_dict(self):
        return {
            "config": self.config_summary,
            "seed": self.seed,
            "bits_total": self.bits_total,
            "bit_errors": self.bit_errors,
            "ber": self.ber,
            "degenerate_bins": self.degenerate_bins,
        }


def demodulate(samples, config, bias, start_index=0):
    """Recover per-symbol grids from a stream of received frames.

    bias is a scalar applied to every frame or one value per frame. Grid
    symbol indices count from start_index so pilot layouts line up.
    """
    samples = np.asarray(samples, dtype=np.float64)
    frame_len = config.frame_len
    if samples.ndim != 1 or samples.size == 0 or samples.size % frame_len != 0:
        raise FramingError(
            f"sample count {samples.size} is not a whole number of "
            f"{frame_len}-sample frames"
        )
    n_frames = samples.size // frame_len
    biases = np.broadcast_to(np.asarray(bias, dtype=np.float64), (n_frames,))
    n = config.n_subcarriers
    m = config.body_len
    scale = 1.0 / math.sqrt(m)
    grids = []
    for i in range(n_frames):
        frame = samples[i * frame_len: (i + 1) * frame_len] - biases[i]
        body = frame[config.cp_len_stream:]
        spectrum = np.fft.fft(body) * scale
        usable = spectrum[1: n // 2]
        index = start_index + i
        grids.append(SubcarrierGrid(usable=usable,
                                    pilot_mask=pilot_mask(config, index),
                                    symbol_index=index))
    return grids


def ls_estimate(grids, config):
    """Least-squares channel estimates, one per grid.

    Comb: per-symbol pilot-bin ratios, linearly interpolated across frequency
    with edge bins held from the nearest pilot. Block: the full estimate from
    each pilot symbol is held for the following data symbols.
    """
    scheme = config.pilot_scheme
    k = config.n_usable
    estimates = []
    if isinstance(scheme, CombPilots):
        bins = np.arange(k, dtype=np.float64)
        for grid in grids:
            mask = grid.pilot_mask
            ref = pilot_values(config, grid.symbol_index)
            _check_pilots(ref, grid.symbol_index)
            ratio = grid.usable[mask] / ref
            pilot_bins = bins[mask]
            gains = (np.interp(bins, pilot_bins, ratio.real)
                     + 1j * np.interp(bins, pilot_bins, ratio.imag))
            estimates.append(ChannelEstimate(gains=gains, source_scheme=scheme,
                                             symbol_index=grid.symbol_index))
        return estimates
    held = None
    held_index = None
    for grid in grids:
        if grid.symbol_index % scheme.period == 0:
            ref = pilot_values(config, grid.symbol_index)
            _check_pilots(ref, grid.symbol_index)
            held = grid.usable / ref
            held_index = grid.symbol_index
        elif held is None:
            raise FramingError(
                f"symbol {grid.symbol_index} precedes any block pilot symbol"
            )
        estimates.append(ChannelEstimate(gains=held, source_scheme=scheme,
                                         symbol_index=held_index))
    return estimates


def _check_pilots(ref, symbol_index):
    if ref.size and np.min(np.abs(ref)) < DEGENERATE_PILOT:
        raise DegeneratePilotError(
            f"pilot magnitude below {DEGENERATE_PILOT} at symbol {symbol_index}"
        )


def zf_equalize(grid, estimate):
    """Divide data bins by the estimated gains, erasing degenerate bins."""
    mask = grid.pilot_mask
    gains = estimate.gains[~mask]
    received = grid.usable[~mask]
    degenerate = np.abs(gains) < DEGENERATE_GAIN
    symbols = np.zeros_like(received)
    good = ~degenerate
    symbols[good] = received[good] / gains[good]
    return EqualizeResult(symbols=symbols, degenerate_bins=int(degenerate.sum()))


def ber(tx_bits, rx_bits, config_summary=None, seed=None, degenerate_bins=0):
    """Hamming-distance bit error rate between two equal-length streams."""
    tx = np.asarray(tx_bits).astype(np.uint8, copy=False)
    rx = np.asarray(rx_bits).astype(np.uint8, copy=False)
    if tx.shape != rx.shape:
        raise ValueError(f"bit stream lengths differ: {tx.shape} vs {rx.shape}")
    errors = int(np.count_nonzero(tx != rx))
    total = int(tx.size)
    return BerReport(bit_errors=errors, bits_total=total, ber=errors / total,
                     config_summary=config_summary or {}, seed=seed,
                     degenerate_bins=degenerate_bins)


def demap_grids(grids, estimates, order):
    """Equalize and demap a grid sequence; returns bits and degenerate count."""
    chunks = []
    degenerate = 0
    for grid, estimate in zip(grids, estimates):
        result = zf_equalize(grid, estimate)
        degenerate += result.degenerate_bins
        if result.symbols.size:
            chunks.append(qam_demap(result.symbols, order))
    if chunks:
        bits = np.concatenate(chunks)
    else:
        bits = np.empty(0, dtype=np.uint8)
    return bits, degenerate
