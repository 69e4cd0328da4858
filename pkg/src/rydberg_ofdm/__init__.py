"""Deterministic simulator of real-valued OFDM through an atomic RF receiver.

The package models the full link: QAM mapping onto a Hermitian-symmetric
subcarrier grid, oversampled real waveform synthesis with cyclic prefix,
clipping and DC biasing, a time-varying gain channel with an atomic readout
curve and detector noise, least-squares pilot equalization, and hard-decision
demapping. On top of the bit transport sit image codecs, link probing, and a
BER-to-codec mapping table.
"""

from .atomic import (
    AtomicLevelScheme,
    EitSpectrum,
    OperatingPoint,
    RabiField,
    ReadoutMode,
    ScalingProperty,
    at_separation,
    atomic_transfer,
    cesium_scheme,
    eit_spectrum,
    estimate_field,
    field_to_rabi,
    rabi_to_field,
    scaling_ratio,
)
from .baseline_codec import (
    baseline_bits_per_image,
    baseline_decode,
    baseline_encode,
)
from .chain import (
    TxStream,
    data_bit_capacity,
    receive_stream,
    run_chain,
    scramble_mask,
    transmit_stream,
)
from .channel import (
    ChannelModel,
    LinkBudget,
    RandomWalkGain,
    SinusoidGain,
    StaticGain,
    apply_channel,
    apply_channel_stream,
    default_operating_point,
    effective_snr,
    shannon_capacity,
)
from .constants import HBAR, PILOT_SEED
from .config import (
    ExperimentConfig,
    SpectrumRequest,
    SweepAxis,
    default_experiment_config,
    default_fading_channel,
    read_experiment_config,
    write_experiment_config,
)
from .errors import (
    CodecError,
    ConfigError,
    DegeneratePilotError,
    FramingError,
    InfiniteCapacityError,
    MalformedSpectrumError,
    RydbergSimError,
    UnsplitSpectrumError,
)
from .frameio import (
    read_bit_file,
    read_frame_dump,
    read_spectrum_csv,
    write_bit_file,
    write_frame_dump,
    write_spectrum_csv,
)
from .images import load_image, psnr, save_image, ssim, to_gray
from .link import (
    CodecDescriptor,
    CodecKind,
    CodecMappingTable,
    ImageMetrics,
    MappingEntry,
    builtin_baseline_descriptor,
    decode_image,
    encode_image,
    handshake,
    probe_ber,
    read_mapping_table,
    run_image_link,
    select_codec,
    write_mapping_table,
)
from .qam import bits_per_symbol, constellation, qam_demap, qam_map
from .receiver import (
    BerReport,
    ChannelEstimate,
    EqualizeResult,
    ber,
    demap_grids,
    demodulate,
    ls_estimate,
    zf_equalize,
)
from .waveform import (
    BlockPilots,
    CombPilots,
    FixedSigma,
    OfdmConfig,
    PeakSafe,
    SampleRate,
    SubcarrierGrid,
    TimeFrame,
    build_grid,
    clip,
    hermitian_extend,
    modulate,
    papr,
    pilot_mask,
    pilot_values,
)

RATE_48K = SampleRate.RATE_48K
RATE_384K = SampleRate.RATE_384K

__version__ = "0.1.0"

__all__ = [
    "AtomicLevelScheme",
    "BerReport",
    "BlockPilots",
    "ChannelEstimate",
    "ChannelModel",
    "CodecDescriptor",
    "CodecError",
    "CodecKind",
    "CodecMappingTable",
    "CombPilots",
    "ConfigError",
    "DegeneratePilotError",
    "EitSpectrum",
    "EqualizeResult",
    "ExperimentConfig",
    "FixedSigma",
    "FramingError",
    "HBAR",
    "ImageMetrics",
    "InfiniteCapacityError",
    "LinkBudget",
    "MalformedSpectrumError",
    "MappingEntry",
    "OfdmConfig",
    "OperatingPoint",
    "PILOT_SEED",
    "PeakSafe",
    "RATE_384K",
    "RATE_48K",
    "RabiField",
    "RandomWalkGain",
    "ReadoutMode",
    "RydbergSimError",
    "SampleRate",
    "ScalingProperty",
    "SinusoidGain",
    "SpectrumRequest",
    "StaticGain",
    "SubcarrierGrid",
    "SweepAxis",
    "TimeFrame",
    "TxStream",
    "UnsplitSpectrumError",
    "apply_channel",
    "apply_channel_stream",
    "at_separation",
    "atomic_transfer",
    "baseline_bits_per_image",
    "baseline_decode",
    "baseline_encode",
    "ber",
    "bits_per_symbol",
    "build_grid",
    "builtin_baseline_descriptor",
    "cesium_scheme",
    "clip",
    "constellation",
    "data_bit_capacity",
    "decode_image",
    "default_experiment_config",
    "default_fading_channel",
    "default_operating_point",
    "demap_grids",
    "demodulate",
    "effective_snr",
    "eit_spectrum",
    "encode_image",
    "estimate_field",
    "field_to_rabi",
    "handshake",
    "hermitian_extend",
    "load_image",
    "ls_estimate",
    "modulate",
    "papr",
    "pilot_mask",
    "pilot_values",
    "probe_ber",
    "psnr",
    "qam_demap",
    "qam_map",
    "rabi_to_field",
    "read_bit_file",
    "read_experiment_config",
    "read_frame_dump",
    "read_mapping_table",
    "read_spectrum_csv",
    "receive_stream",
    "run_chain",
    "run_image_link",
    "save_image",
    "scaling_ratio",
    "scramble_mask",
    "select_codec",
    "shannon_capacity",
    "ssim",
    "to_gray",
    "transmit_stream",
    "write_bit_file",
    "write_experiment_config",
    "write_frame_dump",
    "write_mapping_table",
    "write_spectrum_csv",
    "zf_equalize",
    "__version__",
]
