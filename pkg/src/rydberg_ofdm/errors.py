"""Exception taxonomy shared across the simulator.

The CLI maps these onto its exit-code contract: 0 success, 2 config error,
3 environment/codec error, 4 runtime numerical error.
"""


class RydbergSimError(Exception):
    """Base class for all simulator errors."""

    exit_code = 4


class ConfigError(RydbergSimError):
    """Invalid configuration file, parameter, or schema."""

    exit_code = 2


class CodecError(RydbergSimError):
    """External codec missing, failed handshake, or crashed mid-session."""

    exit_code = 3


class FramingError(RydbergSimError):
    """Sample or bit stream length inconsistent with the frame layout."""


class UnsplitSpectrumError(RydbergSimError):
    """Spectrum has fewer than two qualifying peaks (field below resolution)."""


class MalformedSpectrumError(RydbergSimError):
    """Spectrum has more than two qualifying peaks."""


class DegeneratePilotError(RydbergSimError):
    """Pilot symbol magnitude too small to divide by."""


class InfiniteCapacityError(RydbergSimError):
    """Shannon capacity is unbounded (zero noise with nonzero signal)."""
