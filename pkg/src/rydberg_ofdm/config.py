"""Experiment configuration: JSON schema, validation, and sweep axes.

Every parse error is a ConfigError naming the offending key with a dotted
path, so a bad file fails loudly and points at itself.
"""

import dataclasses
import json
from dataclasses import dataclass, field

from .atomic import AtomicLevelScheme, OperatingPoint, ReadoutMode
from .channel import ChannelModel, RandomWalkGain, SinusoidGain, StaticGain
from .errors import ConfigError
from .waveform import (
    BlockPilots,
    CombPilots,
    FixedSigma,
    OfdmConfig,
    PeakSafe,
    SampleRate,
)

__all__ = [
    "ExperimentConfig",
    "SWEEPABLE_PARAMS",
    "SpectrumRequest",
    "SweepAxis",
    "apply_sweep_value",
    "channel_from_json_dict",
    "channel_to_json_dict",
    "default_experiment_config",
    "default_fading_channel",
    "ofdm_from_json_dict",
    "ofdm_to_json_dict",
    "read_experiment_config",
    "write_experiment_config",
]

SCHEMA_VERSION = 1

# Operating point found in calibration: detector noise and gain drift that
# keep the comb-pilot link around 1% BER and clearly separate the pilot
# schemes and sample rates.
DEFAULT_NOISE_DENSITY = 1.2e-7
DEFAULT_WALK_SIGMA = 8e-4

_MISSING = object()


def _get(mapping, key, path, expect=None, default=_MISSING):
    if not isinstance(mapping, dict):
        raise ConfigError(f"{path}: expected a JSON object")
    if key not in mapping:
        if default is not _MISSING:
            return default
        raise ConfigError(f"{path}.{key}: missing required key")
    value = mapping[key]
    if expect is not None and not isinstance(value, expect):
        names = (expect.__name__ if isinstance(expect, type)
                 else "/".join(t.__name__ for t in expect))
        raise ConfigError(
            f"{path}.{key}: expected {names}, got {type(value).__name__}"
        )
    return value


def _number(mapping, key, path, default=_MISSING):
    value = _get(mapping, key, path, expect=(int, float), default=default)
    if isinstance(value, bool):
        raise ConfigError(f"{path}.{key}: expected a number, got a bool")
    return float(value)


def _integer(mapping, key, path, default=_MISSING):
    value = _get(mapping, key, path, expect=int, default=default)
    if isinstance(value, bool):
        raise ConfigError(f"{path}.{key}: expected an integer, got a bool")
    return int(value)


def _reject_unknown(mapping, known, path):
    for key in mapping:
        if key not in known:
            raise ConfigError(f"{path}.{key}: unknown key")


def ofdm_to_json_dict(config):
    if isinstance(config.pilot_scheme, CombPilots):
        pilots = {"kind": "comb", "spacing": config.pilot_scheme.spacing}
    else:
        pilots = {"kind": "block", "period": config.pilot_scheme.period}
    if isinstance(config.dc_bias_mode, PeakSafe):
        bias = {"kind": "peak_safe"}
    else:
        bias = {"kind": "fixed_sigma", "k": config.dc_bias_mode.k}
    return {
        "n_subcarriers": config.n_subcarriers,
        "qam_order": config.qam_order,
        "pilot_scheme": pilots,
        "clip_threshold_db": config.clip_threshold_db,
        "dc_bias_mode": bias,
        "sample_rate": "48k" if config.sample_rate is SampleRate.RATE_48K
        else "384k",
        "oversampling": config.oversampling,
        "carrier_hz": config.carrier_hz,
    }


def _parse_pilots(payload, path):
    kind = _get(payload, "kind", path, expect=str)
    if kind == "comb":
        _reject_unknown(payload, {"kind", "spacing"}, path)
        return CombPilots(spacing=_integer(payload, "spacing", path, default=4))
    if kind == "block":
        _reject_unknown(payload, {"kind", "period"}, path)
        return BlockPilots(period=_integer(payload, "period", path, default=4))
    raise ConfigError(f"{path}.kind: expected 'comb' or 'block', got {kind!r}")


def _parse_bias(payload, path):
    kind = _get(payload, "kind", path, expect=str)
    if kind == "peak_safe":
        _reject_unknown(payload, {"kind"}, path)
        return PeakSafe()
    if kind == "fixed_sigma":
        _reject_unknown(payload, {"kind", "k"}, path)
        return FixedSigma(k=_number(payload, "k", path, default=3.0))
    raise ConfigError(
        f"{path}.kind: expected 'peak_safe' or 'fixed_sigma', got {kind!r}"
    )


def _parse_rate(value, path):
    if value == "48k":
        return SampleRate.RATE_48K
    if value == "384k":
        return SampleRate.RATE_384K
    raise ConfigError(f"{path}: expected '48k' or '384k', got {value!r}")


def ofdm_from_json_dict(payload, path="ofdm"):
    _reject_unknown(payload, {
        "n_subcarriers", "qam_order", "pilot_scheme", "clip_threshold_db",
        "dc_bias_mode", "sample_rate", "oversampling", "carrier_hz",
    }, path)
    defaults = OfdmConfig()
    try:
        return OfdmConfig(
            n_subcarriers=_integer(payload, "n_subcarriers", path,
                                   default=defaults.n_subcarriers),
            qam_order=_integer(payload, "qam_order", path,
                               default=defaults.qam_order),
            pilot_scheme=_parse_pilots(
                _get(payload, "pilot_scheme", path, expect=dict,
                     default={"kind": "comb", "spacing": 4}),
                f"{path}.pilot_scheme"),
            clip_threshold_db=_number(payload, "clip_threshold_db", path,
                                      default=defaults.clip_threshold_db),
            dc_bias_mode=_parse_bias(
                _get(payload, "dc_bias_mode", path, expect=dict,
                     default={"kind": "peak_safe"}),
                f"{path}.dc_bias_mode"),
            sample_rate=_parse_rate(
                _get(payload, "sample_rate", path, expect=str, default="48k"),
                f"{path}.sample_rate"),
            oversampling=_integer(payload, "oversampling", path,
                                  default=defaults.oversampling),
            carrier_hz=_number(payload, "carrier_hz", path,
                               default=defaults.carrier_hz),
        )
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _scheme_to_json_dict(scheme):
    return dataclasses.asdict(scheme)


_SCHEME_LABEL_FIELDS = frozenset({
    "ground_label", "intermediate_label", "rydberg1_label", "rydberg2_label",
})


def _parse_scheme(payload, path):
    fields = {f.name for f in dataclasses.fields(AtomicLevelScheme)}
    _reject_unknown(payload, fields, path)
    kwargs = {}
    for f in dataclasses.fields(AtomicLevelScheme):
        if f.name in _SCHEME_LABEL_FIELDS:
            kwargs[f.name] = _get(payload, f.name, path, expect=str)
        elif f.name == "n_rydberg1":
            kwargs[f.name] = _integer(payload, f.name, path)
        else:
            kwargs[f.name] = _number(payload, f.name, path)
    try:
        return AtomicLevelScheme(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _readout_to_json_dict(point):
    return {
        "probe_rabi_rad_s": point.probe_rabi,
        "coupling_rabi_rad_s": point.coupling_rabi,
        "rf_detuning_rad_s": point.rf_detuning,
        "readout_mode": point.readout_mode.name.lower(),
        "optical_depth": point.optical_depth,
        "envelope_gain": point.envelope_gain,
        "scheme": _scheme_to_json_dict(point.scheme),
    }


def _parse_readout(payload, path):
    _reject_unknown(payload, {
        "probe_rabi_rad_s", "coupling_rabi_rad_s", "rf_detuning_rad_s",
        "readout_mode", "optical_depth", "envelope_gain", "scheme",
    }, path)
    mode_name = _get(payload, "readout_mode", path, expect=str,
                     default="ideal_envelope")
    try:
        mode = ReadoutMode[mode_name.upper()]
    except KeyError:
        raise ConfigError(
            f"{path}.readout_mode: expected 'ideal_envelope' or "
            f"'eit_nonlinear', got {mode_name!r}"
        ) from None
    scheme_payload = _get(payload, "scheme", path, expect=dict, default=None)
    kwargs = {}
    if scheme_payload is not None:
        kwargs["scheme"] = _parse_scheme(scheme_payload, f"{path}.scheme")
    try:
        return OperatingPoint(
            probe_rabi=_number(payload, "probe_rabi_rad_s", path),
            coupling_rabi=_number(payload, "coupling_rabi_rad_s", path),
            rf_detuning=_number(payload, "rf_detuning_rad_s", path,
                                default=0.0),
            readout_mode=mode,
            optical_depth=_number(payload, "optical_depth", path, default=2.0),
            envelope_gain=_number(payload, "envelope_gain", path, default=1.0),
            **kwargs,
        )
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def channel_to_json_dict(model):
    process = model.gain_process
    if isinstance(process, StaticGain):
        gain = {"kind": "static", "gain": process.gain}
    elif isinstance(process, RandomWalkGain):
        gain = {"kind": "random_walk", "step_sigma": process.step_sigma}
    else:
        gain = {"kind": "sinusoid", "depth": process.depth,
                "period_samples": process.period_samples}
    return {
        "readout": _readout_to_json_dict(model.readout),
        "noise_density": model.noise_density,
        "gain_process": gain,
        "rf_detuning_rad_s": model.rf_detuning,
        "seed": model.seed,
    }


def _parse_gain_process(payload, path):
    kind = _get(payload, "kind", path, expect=str)
    try:
        if kind == "static":
            _reject_unknown(payload, {"kind", "gain"}, path)
            return StaticGain(gain=_number(payload, "gain", path, default=1.0))
        if kind == "random_walk":
            _reject_unknown(payload, {"kind", "step_sigma"}, path)
            return RandomWalkGain(step_sigma=_number(
                payload, "step_sigma", path, default=DEFAULT_WALK_SIGMA))
        if kind == "sinusoid":
            _reject_unknown(payload, {"kind", "depth", "period_samples"}, path)
            return SinusoidGain(
                depth=_number(payload, "depth", path, default=0.1),
                period_samples=_integer(payload, "period_samples", path,
                                        default=4096),
            )
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    raise ConfigError(
        f"{path}.kind: expected 'static', 'random_walk', or 'sinusoid', "
        f"got {kind!r}"
    )


def channel_from_json_dict(payload, path="channel"):
    _reject_unknown(payload, {
        "readout", "noise_density", "gain_process", "rf_detuning_rad_s",
        "seed",
    }, path)
    readout_payload = _get(payload, "readout", path, expect=dict, default=None)
    kwargs = {}
    if readout_payload is not None:
        kwargs["readout"] = _parse_readout(readout_payload, f"{path}.readout")
    gain_payload = _get(payload, "gain_process", path, expect=dict,
                        default={"kind": "static", "gain": 1.0})
    try:
        return ChannelModel(
            noise_density=_number(payload, "noise_density", path, default=0.0),
            gain_process=_parse_gain_process(gain_payload,
                                             f"{path}.gain_process"),
            rf_detuning=_number(payload, "rf_detuning_rad_s", path,
                                default=0.0),
            seed=_integer(payload, "seed", path, default=0),
            **kwargs,
        )
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


@dataclass(frozen=True)
class SweepAxis:
    """One swept parameter and the values it takes."""

    param: str
    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        if self.param not in SWEEPABLE_PARAMS:
            raise ConfigError(
                f"sweep parameter {self.param!r} is not one of "
                f"{sorted(SWEEPABLE_PARAMS)}"
            )
        if not self.values:
            raise ConfigError(f"sweep axis {self.param!r} has no values")


@dataclass(frozen=True)
class SpectrumRequest:
    """RF drive strengths and detuning grid for the spectrum command."""

    rf_rabi_rad_s: tuple = ()
    half_span_rad_s: float = 0.0
    step_rad_s: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "rf_rabi_rad_s",
                           tuple(float(v) for v in self.rf_rabi_rad_s))


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything one simulation campaign needs, JSON round-trippable."""

    ofdm: OfdmConfig = field(default_factory=OfdmConfig)
    channel: ChannelModel = field(default_factory=lambda: ChannelModel())
    sweep: tuple = ()
    seeds: tuple = (0,)
    output_dir: str = "out"
    probe_bits: int = 100_000
    codecs: tuple = ()
    spectrum: SpectrumRequest = field(default_factory=SpectrumRequest)

    def __post_init__(self):
        object.__setattr__(self, "sweep", tuple(self.sweep))
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))
        object.__setattr__(self, "codecs", tuple(self.codecs))
        if not self.seeds:
            raise ConfigError("seeds must be nonempty")
        if self.probe_bits <= 0:
            raise ConfigError("probe_bits must be positive")
        seen = set()
        for axis in self.sweep:
            if axis.param in seen:
                raise ConfigError(f"duplicate sweep axis {axis.param!r}")
            seen.add(axis.param)


def default_fading_channel(seed=0):
    """The calibrated time-varying channel used by the stock experiments."""
    return ChannelModel(
        noise_density=DEFAULT_NOISE_DENSITY,
        gain_process=RandomWalkGain(step_sigma=DEFAULT_WALK_SIGMA),
        seed=seed,
    )


def default_experiment_config():
    return ExperimentConfig(
        ofdm=OfdmConfig(),
        channel=default_fading_channel(),
        sweep=(SweepAxis("pilot_scheme", ("comb", "block")),),
        seeds=tuple(range(20)),
        output_dir="out",
    )


def _apply_pilot_scheme(ofdm, model, value):
    if value == "comb":
        return dataclasses.replace(ofdm, pilot_scheme=CombPilots()), model
    if value == "block":
        return dataclasses.replace(ofdm, pilot_scheme=BlockPilots()), model
    raise ConfigError(
        f"pilot_scheme sweep value must be 'comb' or 'block', got {value!r}"
    )


def _apply_sample_rate(ofdm, model, value):
    return dataclasses.replace(ofdm, sample_rate=_parse_rate(
        value, "sweep.sample_rate")), model


def _apply_ofdm_field(name):
    def apply(ofdm, model, value):
        try:
            return dataclasses.replace(ofdm, **{name: value}), model
        except ValueError as exc:
            raise ConfigError(f"sweep.{name}: {exc}") from exc
    return apply


def _apply_noise_density(ofdm, model, value):
    try:
        return ofdm, dataclasses.replace(model, noise_density=float(value))
    except ValueError as exc:
        raise ConfigError(f"sweep.noise_density: {exc}") from exc


SWEEPABLE_PARAMS = {
    "n_subcarriers": _apply_ofdm_field("n_subcarriers"),
    "qam_order": _apply_ofdm_field("qam_order"),
    "pilot_scheme": _apply_pilot_scheme,
    "sample_rate": _apply_sample_rate,
    "clip_threshold_db": _apply_ofdm_field("clip_threshold_db"),
    "noise_density": _apply_noise_density,
}


def apply_sweep_value(ofdm, model, param, value):
    """Return (ofdm, model) with one swept parameter replaced."""
    return SWEEPABLE_PARAMS[param](ofdm, model, value)


def _codec_to_json_dict(desc):
    from .link import CodecKind

    payload = {
        "codec_id": desc.codec_id,
        "kind": desc.kind.value,
        "width": desc.width,
        "height": desc.height,
        "bits_per_image": desc.bits_per_image,
    }
    if desc.kind is CodecKind.EXTERNAL_PROCESS:
        payload["argv"] = list(desc.argv)
    return payload


def _parse_codec(payload, path):
    from .link import CodecDescriptor, CodecKind

    _reject_unknown(payload, {
        "codec_id", "kind", "width", "height", "bits_per_image", "argv",
    }, path)
    kind_name = _get(payload, "kind", path, expect=str)
    try:
        kind = CodecKind(kind_name)
    except ValueError:
        raise ConfigError(
            f"{path}.kind: expected 'builtin_baseline' or "
            f"'external_process', got {kind_name!r}"
        ) from None
    argv = _get(payload, "argv", path, expect=list, default=[])
    if any(not isinstance(a, str) for a in argv):
        raise ConfigError(f"{path}.argv: every element must be a string")
    try:
        return CodecDescriptor(
            codec_id=_get(payload, "codec_id", path, expect=str),
            kind=kind,
            width=_integer(payload, "width", path),
            height=_integer(payload, "height", path),
            bits_per_image=_integer(payload, "bits_per_image", path),
            argv=tuple(argv),
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _spectrum_to_json_dict(req):
    return {
        "rf_rabi_rad_s": list(req.rf_rabi_rad_s),
        "half_span_rad_s": req.half_span_rad_s,
        "step_rad_s": req.step_rad_s,
    }


def _parse_spectrum(payload, path):
    _reject_unknown(payload, {"rf_rabi_rad_s", "half_span_rad_s",
                              "step_rad_s"}, path)
    values = _get(payload, "rf_rabi_rad_s", path, expect=list, default=[])
    for i, v in enumerate(values):
        if not isinstance(v, (int, float)) or isinstance(v, bool):
            raise ConfigError(f"{path}.rf_rabi_rad_s[{i}]: expected a number")
    return SpectrumRequest(
        rf_rabi_rad_s=tuple(float(v) for v in values),
        half_span_rad_s=_number(payload, "half_span_rad_s", path, default=0.0),
        step_rad_s=_number(payload, "step_rad_s", path, default=0.0),
    )


def experiment_to_json_dict(config):
    return {
        "schema_version": SCHEMA_VERSION,
        "ofdm": ofdm_to_json_dict(config.ofdm),
        "channel": channel_to_json_dict(config.channel),
        "sweep": [{"param": a.param, "values": list(a.values)}
                  for a in config.sweep],
        "seeds": list(config.seeds),
        "output_dir": config.output_dir,
        "probe_bits": config.probe_bits,
        "codecs": [_codec_to_json_dict(d) for d in config.codecs],
        "spectrum": _spectrum_to_json_dict(config.spectrum),
    }


def experiment_from_json_dict(payload, path="config"):
    _reject_unknown(payload, {
        "schema_version", "ofdm", "channel", "sweep", "seeds", "output_dir",
        "probe_bits", "codecs", "spectrum",
    }, path)
    version = _get(payload, "schema_version", path)
    if version != SCHEMA_VERSION:
        raise ConfigError(
            f"{path}.schema_version: expected {SCHEMA_VERSION}, got "
            f"{version!r}"
        )
    axes = []
    raw_sweep = _get(payload, "sweep", path, expect=list, default=[])
    for i, item in enumerate(raw_sweep):
        axis_path = f"{path}.sweep[{i}]"
        values = _get(item, "values", axis_path, expect=list)
        axes.append(SweepAxis(
            param=_get(item, "param", axis_path, expect=str),
            values=tuple(values),
        ))
    raw_seeds = _get(payload, "seeds", path, expect=list, default=[0])
    for i, s in enumerate(raw_seeds):
        if not isinstance(s, int) or isinstance(s, bool):
            raise ConfigError(f"{path}.seeds[{i}]: expected an integer")
    raw_codecs = _get(payload, "codecs", path, expect=list, default=[])
    codecs = tuple(
        _parse_codec(item, f"{path}.codecs[{i}]")
        for i, item in enumerate(raw_codecs)
    )
    config = ExperimentConfig(
        ofdm=ofdm_from_json_dict(
            _get(payload, "ofdm", path, expect=dict, default={}),
            f"{path}.ofdm"),
        channel=channel_from_json_dict(
            _get(payload, "channel", path, expect=dict, default={}),
            f"{path}.channel"),
        sweep=tuple(axes),
        seeds=tuple(raw_seeds),
        output_dir=_get(payload, "output_dir", path, expect=str,
                        default="out"),
        probe_bits=_integer(payload, "probe_bits", path, default=100_000),
        codecs=codecs,
        spectrum=_parse_spectrum(
            _get(payload, "spectrum", path, expect=dict, default={}),
            f"{path}.spectrum"),
    )
    # Surface bad sweep values at parse time, not mid-campaign.
    for axis in config.sweep:
        for value in axis.values:
            apply_sweep_value(config.ofdm, config.channel, axis.param, value)
    return config


def write_experiment_config(path, config):
    with open(path, "w", encoding="ascii") as fh:
        json.dump(experiment_to_json_dict(config), fh, indent=2,
                  sort_keys=True)
        fh.write("\n")


def read_experiment_config(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path}: invalid JSON: {exc}") from exc
    return experiment_from_json_dict(payload)
