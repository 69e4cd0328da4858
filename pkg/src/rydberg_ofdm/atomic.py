"""Atomic receiver front end.

Models the field response of a four-level ladder system driven by probe and
coupling lasers plus an RF field: Rabi/field conversion, principal-quantum-
number scaling laws, steady-state probe-transmission spectra, splitting
extraction, and the per-sample amplitude readout used by the channel module.
"""

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.signal import find_peaks

from .constants import HBAR
from .errors import MalformedSpectrumError, UnsplitSpectrumError
from .kernels import eit_transmission

__all__ = [
    "AtomicLevelScheme",
    "EitSpectrum",
    "OperatingPoint",
    "RabiField",
    "ReadoutMode",
    "ScalingProperty",
    "at_separation",
    "atomic_transfer",
    "cesium_scheme",
    "eit_spectrum",
    "estimate_field",
    "field_to_rabi",
    "rabi_to_field",
    "scaling_ratio",
]

MIN_RYDBERG_N = 10


@dataclass(frozen=True)
class AtomicLevelScheme:
    """Four-level ladder: ground, intermediate, and two RF-coupled Rydberg states.

    Decay rates are population rates in rad/s; the coherence rates used by the
    spectrum model are half of these. The dipole moment is the RF-transition
    moment between the two Rydberg states, in C*m.
    """

    ground_label: str
    intermediate_label: str
    rydberg1_label: str
    rydberg2_label: str
    n_rydberg1: int
    probe_wavelength_nm: float
    coupling_wavelength_nm: float
    dipole_moment: float
    gamma_intermediate: float
    gamma_rydberg: float

    def __post_init__(self):
        positive = {
            "probe_wavelength_nm": self.probe_wavelength_nm,
            "coupling_wavelength_nm": self.coupling_wavelength_nm,
            "dipole_moment": self.dipole_moment,
            "gamma_intermediate": self.gamma_intermediate,
            "gamma_rydberg": self.gamma_rydberg,
        }
        for name, value in positive.items():
            if not value > 0:
                raise ValueError(f"{name} must be strictly positive, got {value}")
        if self.n_rydberg1 < MIN_RYDBERG_N:
            raise ValueError(
                f"n_rydberg1 must be >= {MIN_RYDBERG_N}, got {self.n_rydberg1}"
            )


def cesium_scheme():
    """Default cesium ladder with 852 nm probe and 509 nm coupling lasers."""
    return AtomicLevelScheme(
        ground_label="6S1/2",
        intermediate_label="6P3/2",
        rydberg1_label="62D5/2",
        rydberg2_label="63P3/2",
        n_rydberg1=62,
        probe_wavelength_nm=852.0,
        coupling_wavelength_nm=509.0,
        dipole_moment=1e-26,
        gamma_intermediate=2 * math.pi * 5.22e6,
        gamma_rydberg=2 * math.pi * 1e4,
    )


@dataclass(frozen=True)
class RabiField:
    """A coupling strength expressed both as a Rabi frequency and a field."""

    omega: float
    field_amplitude: float
    dipole_moment: float

    def __post_init__(self):
        if self.omega < 0 or self.field_amplitude < 0:
            raise ValueError("omega and field_amplitude must be nonnegative")
        if not self.dipole_moment > 0:
            raise ValueError("dipole_moment must be strictly positive")
        expected = field_to_rabi(self.field_amplitude, self.dipole_moment)
        scale = max(abs(self.omega), abs(expected), 1e-300)
        if abs(self.omega - expected) > 1e-12 * scale:
            raise ValueError("omega and field_amplitude are inconsistent")

    @classmethod
    def from_omega(cls, omega, dipole_moment):
        return cls(omega, rabi_to_field(omega, dipole_moment), dipole_moment)

    @classmethod
    def from_field(cls, field_amplitude, dipole_moment):
        return cls(field_to_rabi(field_amplitude, dipole_moment), field_amplitude,
                   dipole_moment)


def rabi_to_field(omega, dipole_moment):
    """Field amplitude in V/m that drives the given angular Rabi frequency."""
    if not dipole_moment > 0:
        raise ValueError("dipole_moment must be strictly positive")
    if omega < 0:
        raise ValueError("omega must be nonnegative")
    return HBAR * omega / dipole_moment


def field_to_rabi(field_amplitude, dipole_moment):
    """Angular Rabi frequency in rad/s driven by the given field amplitude."""
    if not dipole_moment > 0:
        raise ValueError("dipole_moment must be strictly positive")
    if field_amplitude < 0:
        raise ValueError("field_amplitude must be nonnegative")
    return field_amplitude * dipole_moment / HBAR


class ScalingProperty(enum.Enum):
    """Properties with known power-law scaling in the principal quantum number."""

    ORBITAL_RADIUS = 2
    LIFETIME = 3
    POLARIZABILITY = 7


def scaling_ratio(prop, n_from, n_to):
    """Ratio of the property at n_to relative to n_from, (n_to/n_from)^p.

    Evaluated in exact rational arithmetic and rounded once to float, so
    representable ratios (for example 31 -> 62) come out exact.
    """
    prop = ScalingProperty(prop)
    if n_from < MIN_RYDBERG_N or n_to < MIN_RYDBERG_N:
        raise ValueError(f"principal quantum numbers must be >= {MIN_RYDBERG_N}")
    return float(Fraction(n_to, n_from) ** prop.value)


class ReadoutMode(enum.Enum):
    """How detector output is derived from the instantaneous RF amplitude."""

    IDEAL_ENVELOPE = "ideal_envelope"
    EIT_NONLINEAR = "eit_nonlinear"


@dataclass(frozen=True)
class OperatingPoint:
    """Laser drive state plus readout configuration of the receiver.

    probe_rabi must stay below coupling_rabi (weak-probe regime). The scheme,
    optical depth, and envelope gain parameterize the readout curve; they
    default to the stock cesium receiver with unit gain.
    """

    probe_rabi: float
    coupling_rabi: float
    rf_detuning: float = 0.0
    readout_mode: ReadoutMode = ReadoutMode.IDEAL_ENVELOPE
    scheme: AtomicLevelScheme = field(default_factory=cesium_scheme)
    optical_depth: float = 2.0
    envelope_gain: float = 1.0

    def __post_init__(self):
        if not self.probe_rabi > 0:
            raise ValueError("probe_rabi must be strictly positive")
        if not self.probe_rabi < self.coupling_rabi:
            raise ValueError("weak-probe regime requires probe_rabi < coupling_rabi")
        if not self.optical_depth > 0:
            raise ValueError("optical_depth must be strictly positive")


@dataclass(frozen=True)
class EitSpectrum:
    """Probe transmission against a strictly increasing probe-detuning grid."""

    detunings: np.ndarray
    transmission: np.ndarray
    rf_rabi: float

    def __post_init__(self):
        detunings = np.asarray(self.detunings, dtype=np.float64)
        transmission = np.asarray(self.transmission, dtype=np.float64)
        object.__setattr__(self, "detunings", detunings)
        object.__setattr__(self, "transmission", transmission)
        if detunings.ndim != 1 or transmission.ndim != 1:
            raise MalformedSpectrumError("spectrum arrays must be one-dimensional")
        if detunings.shape[0] != transmission.shape[0]:
            raise MalformedSpectrumError("detuning and transmission lengths differ")
        if detunings.shape[0] < 3:
            raise MalformedSpectrumError("spectrum needs at least 3 points")
        if not np.all(np.isfinite(detunings)) or not np.all(np.isfinite(transmission)):
            raise MalformedSpectrumError("spectrum contains non-finite values")
        if np.any(np.diff(detunings) <= 0):
            raise MalformedSpectrumError("detunings must be strictly increasing")
        if transmission.min() < 0 or transmission.max() > 1:
            raise MalformedSpectrumError("transmission values must lie in [0, 1]")
        if self.rf_rabi < 0:
            raise MalformedSpectrumError("rf_rabi must be nonnegative")


def _coherence_rates(scheme):
    return (scheme.gamma_intermediate / 2, scheme.gamma_rydberg / 2,
            scheme.gamma_rydberg / 2)


def eit_spectrum(scheme, op_point, rf_rabi, detuning_grid):
    """Steady-state weak-probe transmission spectrum of the ladder system.

    Probe and coupling lasers are taken on resonance; the grid sweeps probe
    detuning and op_point.rf_detuning detunes the RF drive. The normalized
    absorption is the resonant two-level value times gamma2*Re(D)/|D|^2 with

        D = gamma2 - i*dp + (Wc^2/4) / (gamma3 - i*dp + (Wrf^2/4) /
            (gamma4 - i*(dp + drf)))

    and transmission exp(-depth * absorption).
    """
    grid = np.asarray(detuning_grid, dtype=np.float64)
    if grid.ndim != 1 or grid.shape[0] == 0:
        raise ValueError("detuning_grid must be a nonempty 1-D array")
    if grid.shape[0] > 1 and np.any(np.diff(grid) <= 0):
        raise ValueError("detuning_grid must be strictly increasing")
    if rf_rabi < 0:
        raise ValueError("rf_rabi must be nonnegative")
    gamma2, gamma3, gamma4 = _coherence_rates(scheme)
    dp = grid
    inner = gamma4 - 1j * (dp + op_point.rf_detuning)
    mid = gamma3 - 1j * dp + (rf_rabi * rf_rabi / 4) / inner
    denom = gamma2 - 1j * dp + (op_point.coupling_rabi * op_point.coupling_rabi / 4) / mid
    absorb = gamma2 * denom.real / (denom.real * denom.real + denom.imag * denom.imag)
    transmission = np.exp(-op_point.optical_depth * absorb)
    return EitSpectrum(detunings=grid.copy(), transmission=transmission,
                       rf_rabi=float(rf_rabi))


def _refine_peak(detunings, transmission, idx):
    """3-point quadratic vertex around a discrete maximum; falls back to the sample."""
    if idx == 0 or idx == detunings.shape[0] - 1:
        return detunings[idx]
    x = detunings[idx - 1: idx + 2]
    y = transmission[idx - 1: idx + 2]
    a, b, _ = np.polyfit(x - x[1], y, 2)
    if a >= 0:
        return detunings[idx]
    return x[1] - b / (2 * a)


def at_separation(spectrum, prominence_fraction=0.05):
    """Detuning gap between the two transmission maxima of a split spectrum.

    Peaks are discrete local maxima with prominence above prominence_fraction
    of the spectrum's range, refined by quadratic interpolation. Fewer than
    two qualifying peaks means the field is below the splitting resolution.
    """
    transmission = spectrum.transmission
    span = float(transmission.max() - transmission.min())
    if span <= 0:
        raise UnsplitSpectrumError("spectrum is flat; no splitting to measure")
    peaks, _ = find_peaks(transmission, prominence=prominence_fraction * span)
    if peaks.shape[0] < 2:
        raise UnsplitSpectrumError(
            f"found {peaks.shape[0]} qualifying peak(s); field below resolution"
        )
    if peaks.shape[0] > 2:
        raise MalformedSpectrumError(
            f"found {peaks.shape[0]} qualifying peaks; expected exactly 2"
        )
    left = _refine_peak(spectrum.detunings, transmission, peaks[0])
    right = _refine_peak(spectrum.detunings, transmission, peaks[1])
    return float(right - left)


def estimate_field(spectrum, dipole_moment):
    """Field amplitude recovered from the splitting of a measured spectrum."""
    return rabi_to_field(at_separation(spectrum), dipole_moment)


def atomic_transfer(instantaneous_amplitude, op_point):
    """Detector output for the instantaneous RF field amplitude in V/m.

    IDEAL_ENVELOPE is the linear reference: envelope_gain times the amplitude.
    EIT_NONLINEAR evaluates the on-resonance probe-transmission drop caused by
    the amplitude's Rabi frequency, a saturating compressive curve that is zero
    at zero field. Scalars map to scalars, arrays map elementwise.
    """
    amplitude = np.asarray(instantaneous_amplitude, dtype=np.float64)
    if np.any(amplitude < 0):
        raise ValueError("instantaneous_amplitude must be nonnegative")
    scalar = amplitude.ndim == 0
    flat = np.atleast_1d(amplitude)
    if op_point.readout_mode is ReadoutMode.IDEAL_ENVELOPE:
        out = op_point.envelope_gain * flat
    else:
        scheme = op_point.scheme
        gamma2, gamma3, gamma4 = _coherence_rates(scheme)
        omega = flat * scheme.dipole_moment / HBAR
        trans = eit_transmission(omega, gamma2, gamma3, gamma4,
                                 op_point.coupling_rabi, op_point.rf_detuning,
                                 op_point.optical_depth)
        base = eit_transmission(np.zeros(1), gamma2, gamma3, gamma4,
                                op_point.coupling_rabi, op_point.rf_detuning,
                                op_point.optical_depth)
        out = op_point.envelope_gain * (base[0] - trans)
    if scalar:
        return float(out[0])
    return out
