"""Amplitude-only detection channel and capacity bookkeeping.

The receiver sees atomic_transfer(h[t] * s[t]) + w[t]: a time-varying gain
process, the atomic readout curve, and additive Gaussian detector noise whose
variance is noise_density times half the stream sampling rate.
"""

import dataclasses
import math
from dataclasses import dataclass, field

import numpy as np

from .atomic import OperatingPoint, ReadoutMode, atomic_transfer, cesium_scheme
from .constants import TAG_GAIN, TAG_NOISE
from .errors import InfiniteCapacityError
from .kernels import random_walk_gain

__all__ = [
    "ChannelModel",
    "LinkBudget",
    "RandomWalkGain",
    "SinusoidGain",
    "StaticGain",
    "apply_channel",
    "apply_channel_stream",
    "default_operating_point",
    "effective_snr",
    "shannon_capacity",
]

WALK_CLAMP_LOW = 0.1
WALK_CLAMP_HIGH = 10.0


@dataclass(frozen=True)
class StaticGain:
    """Constant channel gain."""

    gain: float = 1.0

    def __post_init__(self):
        if not self.gain > 0:
            raise ValueError("static gain must be strictly positive")


@dataclass(frozen=True)
class RandomWalkGain:
    """Additive Gaussian random walk from unit gain, clamped to [0.1, 10]."""

    step_sigma: float = 8e-4

    def __post_init__(self):
        if not self.step_sigma >= 0:
            raise ValueError("step_sigma must be nonnegative")


@dataclass(frozen=True)
class SinusoidGain:
    """Deterministic sinusoidal gain ripple around unity."""

    depth: float = 0.1
    period_samples: int = 4096

    def __post_init__(self):
        if not 0 <= self.depth < 1:
            raise ValueError("depth must lie in [0, 1)")
        if self.period_samples < 2:
            raise ValueError("period_samples must be at least 2")


def default_operating_point():
    """Stock receiver drive: linear envelope readout on the cesium scheme."""
    return OperatingPoint(
        probe_rabi=2 * math.pi * 0.5e6,
        coupling_rabi=2 * math.pi * 3e6,
        readout_mode=ReadoutMode.IDEAL_ENVELOPE,
        scheme=cesium_scheme(),
    )


@dataclass(frozen=True)
class ChannelModel:
    """Immutable description of one channel realization family."""

    readout: OperatingPoint = field(default_factory=default_operating_point)
    noise_density: float = 0.0
    gain_process: object = field(default_factory=StaticGain)
    rf_detuning: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not self.noise_density >= 0:
            raise ValueError("noise_density must be nonnegative")
        if not isinstance(self.gain_process,
                          (StaticGain, RandomWalkGain, SinusoidGain)):
            raise ValueError(
                "gain_process must be StaticGain, RandomWalkGain, or SinusoidGain"
            )

    def effective_readout(self):
        """Operating point with the channel's RF detuning folded in."""
        if self.rf_detuning == 0.0:
            return self.readout
        return dataclasses.replace(
            self.readout,
            rf_detuning=self.readout.rf_detuning + self.rf_detuning,
        )


def _gain_series(model, n, stream_tag):
    process = model.gain_process
    if isinstance(process, StaticGain):
        return np.full(n, process.gain)
    if isinstance(process, SinusoidGain):
        t = np.arange(n, dtype=np.float64)
        return 1.0 + process.depth * np.sin(
            2 * math.pi * t / process.period_samples)
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(stream_tag)))
    steps = rng.standard_normal(n)
    return random_walk_gain(steps, 1.0, process.step_sigma,
                            WALK_CLAMP_LOW, WALK_CLAMP_HIGH)


def _noise(model, n, sample_rate_hz, stream_tag):
    if model.noise_density == 0.0:
        return None
    sigma = math.sqrt(model.noise_density * sample_rate_hz / 2)
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(stream_tag)))
    return sigma * rng.standard_normal(n)


def _transfer(samples, model):
    readout = model.effective_readout()
    if readout.readout_mode is ReadoutMode.EIT_NONLINEAR and samples.min() < 0:
        raise ValueError(
            "negative sample entering the nonlinear readout; DC bias was "
            "insufficient"
        )
    return atomic_transfer(samples, readout)


def apply_channel(frame, model, frame_index=0):
    """Channel output for one frame; frames with distinct indices are
    statistically independent and may be processed concurrently."""
    s = np.asarray(frame.samples, dtype=np.float64)
    n = s.shape[0]
    h = _gain_series(model, n, [model.seed, TAG_GAIN, frame_index])
    y = _transfer(h * s, model)
    w = _noise(model, n, frame.sample_rate_hz, [model.seed, TAG_NOISE, frame_index])
    if w is not None:
        y = y + w
    return y


def apply_channel_stream(samples, model, sample_rate_hz):
    """Channel output for a whole contiguous sample stream.

    The gain process evolves continuously across the stream (a random walk
    does not reset at frame boundaries), so multi-frame transmissions should
    pass through here in one call.
    """
    s = np.asarray(samples, dtype=np.float64)
    n = s.shape[0]
    h = _gain_series(model, n, [model.seed, TAG_GAIN])
    y = _transfer(h * s, model)
    w = _noise(model, n, sample_rate_hz, [model.seed, TAG_NOISE])
    if w is not None:
        y = y + w
    return y


@dataclass(frozen=True)
class LinkBudget:
    """Bandwidth and power bookkeeping for a capacity evaluation."""

    bandwidth_hz: float
    signal_power_w: float
    noise_power_w: float
    interference_power_w: float = 0.0

    def __post_init__(self):
        if self.bandwidth_hz < 0:
            raise ValueError("bandwidth_hz must be nonnegative")
        for name in ("signal_power_w", "noise_power_w", "interference_power_w"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")


def shannon_capacity(budget):
    """Capacity in bit/s of the additive-noise link described by the budget."""
    if budget.bandwidth_hz == 0 or budget.signal_power_w == 0:
        return 0.0
    disturbance = budget.noise_power_w + budget.interference_power_w
    if disturbance == 0:
        raise InfiniteCapacityError(
            "noise and interference are both zero with nonzero signal power"
        )
    return budget.bandwidth_hz * math.log2(1 + budget.signal_power_w / disturbance)


def effective_snr(model, frame, frame_index=0):
    """Mean noiseless channel output power over noise variance, in dB.

    Returns +inf for a noiseless model and -inf for a zero-signal frame.
    """
    quiet = dataclasses.replace(model, noise_density=0.0)
    y = apply_channel(frame, quiet, frame_index=frame_index)
    signal_power = float(np.mean(y * y))
    if model.noise_density == 0.0:
        return math.inf
    if signal_power == 0.0:
        return -math.inf
    variance = model.noise_density * frame.sample_rate_hz / 2
    return 10 * math.log10(signal_power / variance)
