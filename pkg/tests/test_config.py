"""JSON configuration: round trips, validation, and sweep axes."""

import math

import pytest

from rydberg_ofdm import (
    BlockPilots,
    ChannelModel,
    CodecKind,
    CombPilots,
    ConfigError,
    FixedSigma,
    OfdmConfig,
    OperatingPoint,
    PeakSafe,
    RandomWalkGain,
    ReadoutMode,
    SampleRate,
    SinusoidGain,
    StaticGain,
    builtin_baseline_descriptor,
)
from rydberg_ofdm.config import (
    ExperimentConfig,
    SWEEPABLE_PARAMS,
    SpectrumRequest,
    SweepAxis,
    apply_sweep_value,
    channel_from_json_dict,
    channel_to_json_dict,
    default_experiment_config,
    default_fading_channel,
    experiment_from_json_dict,
    experiment_to_json_dict,
    ofdm_from_json_dict,
    ofdm_to_json_dict,
    read_experiment_config,
    write_experiment_config,
)

TAU = 2 * math.pi


class TestOfdmJson:
    @pytest.mark.parametrize("config", [
        OfdmConfig(),
        OfdmConfig(n_subcarriers=512, qam_order=64,
                   pilot_scheme=BlockPilots(period=8),
                   clip_threshold_db=12.0,
                   dc_bias_mode=FixedSigma(k=2.5),
                   sample_rate=SampleRate.RATE_384K),
        OfdmConfig(n_subcarriers=1024, qam_order=4,
                   pilot_scheme=CombPilots(spacing=8),
                   dc_bias_mode=PeakSafe()),
    ])
    def test_round_trip(self, config):
        assert ofdm_from_json_dict(ofdm_to_json_dict(config)) == config

    def test_empty_payload_gives_defaults(self):
        assert ofdm_from_json_dict({}) == OfdmConfig()

    def test_unknown_key_names_path(self):
        with pytest.raises(ConfigError, match=r"ofdm\.bogus"):
            ofdm_from_json_dict({"bogus": 1})

    def test_bool_is_not_a_number(self):
        with pytest.raises(ConfigError, match="clip_threshold_db"):
            ofdm_from_json_dict({"clip_threshold_db": True})

    def test_invalid_subcarrier_count_wrapped(self):
        with pytest.raises(ConfigError):
            ofdm_from_json_dict({"n_subcarriers": 300})

    def test_bad_pilot_kind(self):
        with pytest.raises(ConfigError, match="pilot_scheme.kind"):
            ofdm_from_json_dict({"pilot_scheme": {"kind": "lattice"}})

    def test_bad_sample_rate(self):
        with pytest.raises(ConfigError, match="sample_rate"):
            ofdm_from_json_dict({"sample_rate": "96k"})


class TestChannelJson:
    @pytest.mark.parametrize("model", [
        ChannelModel(),
        ChannelModel(noise_density=1.2e-7,
                     gain_process=RandomWalkGain(step_sigma=8e-4), seed=3),
        ChannelModel(gain_process=SinusoidGain(depth=0.2,
                                               period_samples=2048)),
        ChannelModel(gain_process=StaticGain(gain=0.7),
                     readout=OperatingPoint(
                         probe_rabi=TAU * 0.5e6, coupling_rabi=TAU * 3e6,
                         readout_mode=ReadoutMode.EIT_NONLINEAR,
                         optical_depth=1.5, envelope_gain=2.0),
                     rf_detuning=TAU * 1e5),
    ])
    def test_round_trip(self, model):
        assert channel_from_json_dict(channel_to_json_dict(model)) == model

    def test_scheme_survives_round_trip(self):
        base = ChannelModel()
        payload = channel_to_json_dict(base)
        assert payload["readout"]["scheme"]["n_rydberg1"] == 62
        assert channel_from_json_dict(payload).readout.scheme == \
            base.readout.scheme

    def test_bad_readout_mode(self):
        payload = channel_to_json_dict(ChannelModel())
        payload["readout"]["readout_mode"] = "magic"
        with pytest.raises(ConfigError, match="readout_mode"):
            channel_from_json_dict(payload)

    def test_bad_gain_kind(self):
        with pytest.raises(ConfigError, match="gain_process.kind"):
            channel_from_json_dict({"gain_process": {"kind": "brownian"}})

    def test_negative_noise_wrapped(self):
        with pytest.raises(ConfigError):
            channel_from_json_dict({"noise_density": -1.0})

    def test_default_fading_channel_is_calibrated(self):
        model = default_fading_channel(seed=7)
        assert model.noise_density == pytest.approx(1.2e-7)
        assert isinstance(model.gain_process, RandomWalkGain)
        assert model.seed == 7


class TestSweepAxis:
    def test_unknown_param_rejected(self):
        with pytest.raises(ConfigError, match="not one of"):
            SweepAxis("coupling_rabi", (1.0,))

    def test_empty_values_rejected(self):
        with pytest.raises(ConfigError, match="no values"):
            SweepAxis("qam_order", ())

    def test_all_params_apply_cleanly(self):
        cases = {
            "n_subcarriers": 512,
            "qam_order": 64,
            "pilot_scheme": "block",
            "sample_rate": "384k",
            "clip_threshold_db": 12.0,
            "noise_density": 5e-7,
        }
        assert set(cases) == set(SWEEPABLE_PARAMS)
        base_ofdm, base_model = OfdmConfig(), ChannelModel()
        for param, value in cases.items():
            ofdm, model = apply_sweep_value(base_ofdm, base_model, param,
                                            value)
            assert (ofdm, model) != (base_ofdm, base_model)

    def test_bad_sweep_value_raises_config_error(self):
        with pytest.raises(ConfigError):
            apply_sweep_value(OfdmConfig(), ChannelModel(), "qam_order", 5)
        with pytest.raises(ConfigError):
            apply_sweep_value(OfdmConfig(), ChannelModel(), "pilot_scheme",
                              "diagonal")


class TestExperimentConfig:
    def full_config(self):
        return ExperimentConfig(
            ofdm=OfdmConfig(n_subcarriers=512, qam_order=16),
            channel=default_fading_channel(),
            sweep=(SweepAxis("pilot_scheme", ("comb", "block")),
                   SweepAxis("sample_rate", ("48k", "384k"))),
            seeds=(0, 1, 2),
            output_dir="results",
            probe_bits=50_000,
            codecs=(builtin_baseline_descriptor(),),
            spectrum=SpectrumRequest(rf_rabi_rad_s=(0.0, TAU * 5e6),
                                     half_span_rad_s=TAU * 10e6,
                                     step_rad_s=TAU * 1e4),
        )

    def test_dict_round_trip(self):
        config = self.full_config()
        assert experiment_from_json_dict(
            experiment_to_json_dict(config)) == config

    def test_file_round_trip(self, tmp_path):
        config = self.full_config()
        path = tmp_path / "exp.json"
        write_experiment_config(path, config)
        assert read_experiment_config(path) == config

    def test_default_config_round_trips(self):
        config = default_experiment_config()
        assert experiment_from_json_dict(
            experiment_to_json_dict(config)) == config

    def test_schema_version_checked(self):
        payload = experiment_to_json_dict(self.full_config())
        payload["schema_version"] = 99
        with pytest.raises(ConfigError, match="schema_version"):
            experiment_from_json_dict(payload)

    def test_duplicate_sweep_axis_rejected(self):
        with pytest.raises(ConfigError, match="duplicate"):
            ExperimentConfig(sweep=(SweepAxis("qam_order", (4,)),
                                    SweepAxis("qam_order", (16,))))

    def test_empty_seeds_rejected(self):
        with pytest.raises(ConfigError, match="seeds"):
            ExperimentConfig(seeds=())

    def test_nonpositive_probe_bits_rejected(self):
        with pytest.raises(ConfigError, match="probe_bits"):
            ExperimentConfig(probe_bits=0)

    def test_non_integer_seed_rejected(self):
        payload = experiment_to_json_dict(ExperimentConfig())
        payload["seeds"] = [0, "one"]
        with pytest.raises(ConfigError, match=r"seeds\[1\]"):
            experiment_from_json_dict(payload)

    def test_bad_sweep_value_caught_at_parse_time(self):
        payload = experiment_to_json_dict(ExperimentConfig(
            sweep=(SweepAxis("qam_order", (4, 16)),)))
        payload["sweep"][0]["values"] = [4, 5]
        with pytest.raises(ConfigError):
            experiment_from_json_dict(payload)

    def test_external_codec_round_trips(self):
        from rydberg_ofdm import CodecDescriptor

        config = ExperimentConfig(codecs=(CodecDescriptor(
            codec_id="ext", kind=CodecKind.EXTERNAL_PROCESS,
            width=64, height=64, bits_per_image=64 * 64 * 8,
            argv=("/usr/bin/env", "codec")),))
        loaded = experiment_from_json_dict(experiment_to_json_dict(config))
        assert loaded.codecs[0].argv == ("/usr/bin/env", "codec")

    def test_invalid_json_file_reported(self, tmp_path):
        path = tmp_path / "exp.json"
        path.write_text("{]")
        with pytest.raises(ConfigError, match="invalid JSON"):
            read_experiment_config(path)

    def test_unknown_top_level_key(self):
        with pytest.raises(ConfigError, match=r"config\.extra"):
            experiment_from_json_dict({"schema_version": 1, "extra": 1})
