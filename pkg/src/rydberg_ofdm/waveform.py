"""Transmit waveform synthesis.

Hermitian-symmetric OFDM for an amplitude-only link: QAM data plus pilots on
the usable half-spectrum, real-valued synthesis by inverse FFT with 4x
frequency-domain oversampling, cyclic prefix, hard clipping, and DC biasing.
"""

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .constants import PILOT_SEED
from .qam import bits_per_symbol

__all__ = [
    "BlockPilots",
    "CombPilots",
    "DcBiasMode",
    "FixedSigma",
    "OfdmConfig",
    "PeakSafe",
    "SampleRate",
    "SubcarrierGrid",
    "TimeFrame",
    "build_grid",
    "clip",
    "hermitian_extend",
    "modulate",
    "papr",
    "pilot_mask",
    "pilot_values",
]

ALLOWED_SUBCARRIERS = (256, 512, 1024)
OVERSAMPLING = 4


@dataclass(frozen=True)
class CombPilots:
    """Pilot subcarriers at a fixed spacing inside every symbol."""

    spacing: int = 4

    def __post_init__(self):
        if self.spacing < 2:
            raise ValueError("comb spacing must be at least 2")


@dataclass(frozen=True)
class BlockPilots:
    """Entire pilot symbols at a fixed period in time."""

    period: int = 4

    def __post_init__(self):
        if self.period < 2:
            raise ValueError("block period must be at least 2")


@dataclass(frozen=True)
class PeakSafe:
    """Bias by the exact amount that makes the frame nonnegative."""


@dataclass(frozen=True)
class FixedSigma:
    """Bias by k standard deviations, then zero-clip any residual negatives."""

    k: float = 3.0

    def __post_init__(self):
        if not self.k > 0:
            raise ValueError("k must be strictly positive")


DcBiasMode = (PeakSafe, FixedSigma)


class SampleRate(enum.Enum):
    """Baseband sampling-rate labels; the synthesized stream runs 4x faster."""

    RATE_48K = 48_000
    RATE_384K = 384_000

    @property
    def baseband_hz(self):
        return float(self.value)

    @property
    def stream_hz(self):
        return float(self.value * OVERSAMPLING)


@dataclass(frozen=True)
class OfdmConfig:
    """All waveform parameters of one link configuration."""

    n_subcarriers: int = 256
    qam_order: int = 16
    pilot_scheme: object = field(default_factory=CombPilots)
    clip_threshold_db: float = 5.0
    dc_bias_mode: object = field(default_factory=PeakSafe)
    sample_rate: SampleRate = SampleRate.RATE_48K
    oversampling: int = OVERSAMPLING
    carrier_hz: float = 2.911e9

    def __post_init__(self):
        if self.n_subcarriers not in ALLOWED_SUBCARRIERS:
            raise ValueError(
                f"n_subcarriers must be one of {ALLOWED_SUBCARRIERS}, "
                f"got {self.n_subcarriers}"
            )
        if self.oversampling != OVERSAMPLING:
            raise ValueError(f"oversampling is fixed at {OVERSAMPLING}")
        bits_per_symbol(self.qam_order)
        if not isinstance(self.pilot_scheme, (CombPilots, BlockPilots)):
            raise ValueError("pilot_scheme must be CombPilots or BlockPilots")
        if not isinstance(self.dc_bias_mode, (PeakSafe, FixedSigma)):
            raise ValueError("dc_bias_mode must be PeakSafe or FixedSigma")
        if not isinstance(self.sample_rate, SampleRate):
            raise ValueError("sample_rate must be a SampleRate")
        if not self.clip_threshold_db > 0:
            raise ValueError("clip_threshold_db must be strictly positive")

    @property
    def cp_len_baseband(self):
        """Cyclic-prefix length in baseband samples, an eighth of a symbol."""
        return self.n_subcarriers // 8

    @property
    def n_usable(self):
        """Independent data-carrying bins: half spectrum minus DC and Nyquist."""
        return self.n_subcarriers // 2 - 1

    @property
    def cp_len_stream(self):
        return self.oversampling * self.cp_len_baseband

    @property
    def frame_len(self):
        return self.oversampling * (self.n_subcarriers + self.cp_len_baseband)

    @property
    def body_len(self):
        return self.oversampling * self.n_subcarriers


@dataclass(frozen=True)
class SubcarrierGrid:
    """One symbol's usable half-spectrum plus its pilot layout."""

    usable: np.ndarray
    pilot_mask: np.ndarray
    symbol_index: int

    def __post_init__(self):
        usable = np.asarray(self.usable, dtype=np.complex128)
        mask = np.asarray(self.pilot_mask, dtype=bool)
        object.__setattr__(self, "usable", usable)
        object.__setattr__(self, "pilot_mask", mask)
        if usable.ndim != 1 or mask.ndim != 1:
            raise ValueError("grid arrays must be one-dimensional")
        if usable.shape[0] != mask.shape[0]:
            raise ValueError("usable and pilot_mask lengths differ")
        if self.symbol_index < 0:
            raise ValueError("symbol_index must be nonnegative")

    @property
    def data_symbols(self):
        return self.usable[~self.pilot_mask]


@dataclass(frozen=True)
class TimeFrame:
    """One synthesized transmit frame of real nonnegative samples."""

    samples: np.ndarray
    bias: float
    papr_db: float
    sample_rate_hz: float

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        object.__setattr__(self, "samples", samples)
        if samples.ndim != 1:
            raise ValueError("samples must be one-dimensional")
        if self.bias < 0:
            raise ValueError("bias must be nonnegative")


def pilot_mask(config, symbol_index):
    """Boolean mask over usable bins marking pilot positions for this symbol."""
    scheme = config.pilot_scheme
    k = config.n_usable
    if isinstance(scheme, CombPilots):
        mask = np.zeros(k, dtype=bool)
        mask[:: scheme.spacing] = True
        return mask
    if symbol_index % scheme.period == 0:
        return np.ones(k, dtype=bool)
    return np.zeros(k, dtype=bool)


def pilot_values(config, symbol_index):
    """Deterministic QPSK pilot sequence for this symbol's pilot bins.

    Both ends regenerate the same sequence from a fixed published seed and
    the symbol index, so pilots never travel out of band.
    """
    n_pilots = int(pilot_mask(config, symbol_index).sum())
    if n_pilots == 0:
        return np.empty(0, dtype=np.complex128)
    rng = np.random.Generator(
        np.random.PCG64(np.random.SeedSequence([PILOT_SEED, symbol_index]))
    )
    corners = np.array([1 + 1j, 1 - 1j, -1 + 1j, -1 - 1j]) / math.sqrt(2)
    return corners[rng.integers(0, 4, size=n_pilots)]


def build_grid(data_symbols, config, symbol_index):
    """Interleave data symbols with this symbol's pilots into a grid."""
    mask = pilot_mask(config, symbol_index)
    data_symbols = np.asarray(data_symbols, dtype=np.complex128)
    n_data = int((~mask).sum())
    if data_symbols.shape[0] != n_data:
        raise ValueError(
            f"symbol {symbol_index} needs {n_data} data symbols, "
            f"got {data_symbols.shape[0]}"
        )
    usable = np.zeros(config.n_usable, dtype=np.complex128)
    usable[~mask] = data_symbols
    usable[mask] = pilot_values(config, symbol_index)
    return SubcarrierGrid(usable=usable, pilot_mask=mask, symbol_index=symbol_index)


def hermitian_extend(grid):
    """Full N-bin spectrum whose inverse transform is real.

    DC and Nyquist are zero; bins 1..N/2-1 carry the usable symbols and the
    upper half mirrors them conjugated.
    """
    usable = grid.usable if isinstance(grid, SubcarrierGrid) else np.asarray(
        grid, dtype=np.complex128)
    k = usable.shape[0]
    n = 2 * (k + 1)
    spectrum = np.zeros(n, dtype=np.complex128)
    spectrum[1: k + 1] = usable
    spectrum[k + 2:] = np.conj(usable[::-1])
    return spectrum


def papr(samples):
    """Peak-to-average power ratio in dB."""
    samples = np.asarray(samples, dtype=np.float64)
    if samples.size == 0:
        raise ValueError("samples must be nonempty")
    power = samples * samples
    mean = power.mean()
    if mean == 0:
        raise ValueError("papr undefined for an all-zero signal")
    return 10 * math.log10(power.max() / mean)


def clip(samples, threshold_db, reference_power=None):
    """Hard-limit amplitudes to threshold_db above the mean power.

    The limit derives from the input's own mean power unless reference_power
    pins it, which makes re-clipping an already clipped signal a no-op.
    All-zero input is returned unchanged.
    """
    samples = np.asarray(samples, dtype=np.float64)
    if samples.size == 0:
        raise ValueError("samples must be nonempty")
    power = reference_power if reference_power is not None else float(
        np.mean(samples * samples))
    if power == 0:
        return samples.copy()
    limit = math.sqrt(power * 10 ** (threshold_db / 10))
    return np.clip(samples, -limit, limit)


def _synthesize_body(grid, config):
    """Oversampled real body: zero-pad the spectrum and inverse transform."""
    n = config.n_subcarriers
    m = config.body_len
    spectrum = hermitian_extend(grid)
    padded = np.zeros(m, dtype=np.complex128)
    padded[: n // 2 + 1] = spectrum[: n // 2 + 1]
    padded[m - n // 2 + 1:] = spectrum[n // 2 + 1:]
    body = np.fft.ifft(padded) * math.sqrt(m)
    peak_re = np.max(np.abs(body.real))
    peak_im = np.max(np.abs(body.imag))
    if peak_re > 0 and peak_im > 1e-9 * peak_re:
        raise ValueError("synthesis produced a non-real signal")
    return body.real


def modulate(grid, config):
    """Synthesize one transmit frame: body, cyclic prefix, clip, DC bias."""
    body = _synthesize_body(grid, config)
    cp = config.cp_len_stream
    assembled = np.concatenate([body[-cp:], body]) if cp else body
    clipped = clip(assembled, config.clip_threshold_db)
    mode = config.dc_bias_mode
    if isinstance(mode, PeakSafe):
        low = float(clipped.min())
        bias = -low if low < 0 else 0.0
        biased = clipped + bias
    else:
        bias = mode.k * float(clipped.std())
        biased = np.maximum(clipped + bias, 0.0)
    peak = float(np.max(np.abs(clipped)))
    papr_db = papr(clipped) if peak > 0 else 0.0
    return TimeFrame(samples=biased, bias=bias, papr_db=papr_db,
                     sample_rate_hz=config.sample_rate.stream_hz)
