"""Link orchestration: probing, codec selection, image transmission."""

import dataclasses
import sys
import textwrap

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rydberg_ofdm import (
    CodecDescriptor,
    CodecError,
    CodecKind,
    CodecMappingTable,
    ConfigError,
    FramingError,
    MappingEntry,
    OfdmConfig,
    baseline_decode,
    baseline_encode,
    builtin_baseline_descriptor,
    decode_image,
    encode_image,
    handshake,
    probe_ber,
    psnr,
    read_mapping_table,
    run_image_link,
    select_codec,
    write_mapping_table,
)

RAW_CODEC = textwrap.dedent(
    """
    import sys

    import numpy as np

    from rydberg_ofdm import load_image, read_bit_file, save_image, write_bit_file

    def main():
        cmd = sys.argv[1]
        args = dict(zip(sys.argv[2::2], sys.argv[3::2]))
        if cmd == "encode":
            image = load_image(args["--in"])
            write_bit_file(args["--out"], np.unpackbits(image.reshape(-1)))
        elif cmd == "decode":
            bits = read_bit_file(args["--in"])
            save_image(args["--out"], np.packbits(bits).reshape(16, 16))
        else:
            sys.exit(2)

    main()
    """
)


@pytest.fixture
def raw_codec(tmp_path):
    script = tmp_path / "raw_codec.py"
    script.write_text(RAW_CODEC)
    return CodecDescriptor(
        codec_id="raw-16",
        kind=CodecKind.EXTERNAL_PROCESS,
        width=16,
        height=16,
        bits_per_image=16 * 16 * 8,
        argv=(sys.executable, str(script)),
    )


def small_table():
    return CodecMappingTable(
        entries=(
            MappingEntry(0.02, "codec-low"),
            MappingEntry(0.08, "codec-mid"),
            MappingEntry(1.0, "codec-high"),
        ),
        metadata={"training_ber_levels": [0.01, 0.07]},
    )


class TestCodecDescriptor:
    def test_builtin_descriptor_bit_budget(self):
        descriptor = builtin_baseline_descriptor()
        assert descriptor.bits_per_image == 256 * 256 * 27
        assert descriptor.kind is CodecKind.BUILTIN_BASELINE

    def test_nonpositive_bits_rejected(self):
        with pytest.raises(ConfigError):
            CodecDescriptor(codec_id="x", kind=CodecKind.BUILTIN_BASELINE,
                            width=8, height=8, bits_per_image=0)

    def test_external_requires_argv(self):
        with pytest.raises(ConfigError):
            CodecDescriptor(codec_id="x", kind=CodecKind.EXTERNAL_PROCESS,
                            width=8, height=8, bits_per_image=64)


class TestBuiltinCodecPath:
    def test_encode_matches_baseline(self, portrait):
        descriptor = builtin_baseline_descriptor()
        assert np.array_equal(encode_image(descriptor, portrait),
                              baseline_encode(portrait))

    def test_decode_validates_bit_count(self, portrait):
        descriptor = builtin_baseline_descriptor()
        with pytest.raises(FramingError):
            decode_image(descriptor, np.zeros(10, dtype=np.uint8))

    def test_wrong_image_shape_rejected(self):
        descriptor = builtin_baseline_descriptor(width=64, height=64)
        with pytest.raises(CodecError):
            encode_image(descriptor, np.zeros((32, 32), dtype=np.uint8))

    def test_handshake_passes(self):
        handshake(builtin_baseline_descriptor(width=64, height=64))


class TestExternalCodecPath:
    def test_round_trip_through_files(self, raw_codec):
        rng = np.random.Generator(np.random.PCG64(1))
        image = rng.integers(0, 256, size=(16, 16), dtype=np.uint8)
        bits = encode_image(raw_codec, image)
        assert bits.size == raw_codec.bits_per_image
        assert np.array_equal(decode_image(raw_codec, bits), image)

    def test_handshake_passes(self, raw_codec):
        handshake(raw_codec)

    def test_failing_codec_surfaces_stderr(self, tmp_path):
        script = tmp_path / "broken.py"
        script.write_text(
            "import sys; sys.stderr.write('model file missing'); sys.exit(1)")
        descriptor = CodecDescriptor(
            codec_id="broken", kind=CodecKind.EXTERNAL_PROCESS,
            width=16, height=16, bits_per_image=2048,
            argv=(sys.executable, str(script)))
        with pytest.raises(CodecError, match="model file missing"):
            encode_image(descriptor, np.zeros((16, 16), dtype=np.uint8))

    def test_missing_executable_reported(self):
        descriptor = CodecDescriptor(
            codec_id="ghost", kind=CodecKind.EXTERNAL_PROCESS,
            width=16, height=16, bits_per_image=2048,
            argv=("/nonexistent/codec-binary",))
        with pytest.raises(CodecError, match="could not start"):
            encode_image(descriptor, np.zeros((16, 16), dtype=np.uint8))

    def test_wrong_declared_length_fails_handshake(self, tmp_path):
        script = tmp_path / "raw_codec.py"
        script.write_text(RAW_CODEC)
        descriptor = CodecDescriptor(
            codec_id="short", kind=CodecKind.EXTERNAL_PROCESS,
            width=16, height=16, bits_per_image=2048 + 8,
            argv=(sys.executable, str(script)))
        with pytest.raises(CodecError):
            handshake(descriptor)


class TestMappingTable:
    def test_valid_table_round_trips_through_json(self, tmp_path):
        table = small_table()
        path = tmp_path / "table.json"
        write_mapping_table(path, table)
        loaded = read_mapping_table(path)
        assert loaded == table
        assert loaded.metadata == {"training_ber_levels": [0.01, 0.07]}

    def test_empty_table_rejected(self):
        with pytest.raises(ConfigError):
            CodecMappingTable(entries=())

    def test_non_increasing_bounds_rejected(self):
        with pytest.raises(ConfigError):
            CodecMappingTable(entries=(MappingEntry(0.5, "a"),
                                       MappingEntry(0.5, "b"),
                                       MappingEntry(1.0, "c")))

    def test_last_bound_must_be_one(self):
        with pytest.raises(ConfigError):
            CodecMappingTable(entries=(MappingEntry(0.5, "a"),))

    def test_duplicate_codec_ids_rejected(self):
        with pytest.raises(ConfigError):
            CodecMappingTable(entries=(MappingEntry(0.5, "a"),
                                       MappingEntry(1.0, "a")))

    def test_zero_bound_rejected(self):
        with pytest.raises(ConfigError):
            CodecMappingTable(entries=(MappingEntry(0.0, "a"),
                                       MappingEntry(1.0, "b")))

    def test_bad_schema_version_rejected(self):
        with pytest.raises(ConfigError):
            CodecMappingTable.from_json_dict({"schema_version": 2,
                                              "entries": []})

    def test_corrupt_json_rejected(self, tmp_path):
        path = tmp_path / "table.json"
        path.write_text("{not json")
        with pytest.raises(ConfigError):
            read_mapping_table(path)


class TestSelectCodec:
    def test_zero_ber_selects_first(self):
        assert select_codec(0.0, small_table()) == "codec-low"

    def test_unit_ber_selects_last(self):
        assert select_codec(1.0, small_table()) == "codec-high"

    def test_bound_is_inclusive(self):
        assert select_codec(0.02, small_table()) == "codec-low"
        assert select_codec(0.020000001, small_table()) == "codec-mid"

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            select_codec(-0.1, small_table())
        with pytest.raises(ValueError):
            select_codec(1.1, small_table())

    @given(a=st.floats(0.0, 1.0), b=st.floats(0.0, 1.0))
    def test_selection_monotone(self, a, b):
        table = small_table()
        bounds = {e.codec_id: e.ber_upper_bound for e in table.entries}
        low, high = sorted((a, b))
        assert bounds[select_codec(low, table)] <= bounds[
            select_codec(high, table)]


class TestProbeBer:
    def test_identity_channel_probes_zero(self, identity_model):
        config = OfdmConfig(n_subcarriers=256, qam_order=4)
        report = probe_ber(config, identity_model, seed=0, n_bits=20_000)
        assert report.ber == 0.0

    def test_same_seed_is_bit_exact(self, identity_model):
        config = OfdmConfig(n_subcarriers=256)
        model = dataclasses.replace(identity_model, noise_density=2e-6)
        a = probe_ber(config, model, seed=5, n_bits=20_000)
        b = probe_ber(config, model, seed=5, n_bits=20_000)
        assert a.ber == b.ber
        assert a.bit_errors == b.bit_errors

    def test_probe_seed_overrides_model_seed(self, identity_model):
        config = OfdmConfig(n_subcarriers=256)
        noisy_a = dataclasses.replace(identity_model, noise_density=2e-6,
                                      seed=100)
        noisy_b = dataclasses.replace(identity_model, noise_density=2e-6,
                                      seed=200)
        a = probe_ber(config, noisy_a, seed=5, n_bits=20_000)
        b = probe_ber(config, noisy_b, seed=5, n_bits=20_000)
        assert a.bit_errors == b.bit_errors

    def test_below_statistical_floor_rejected(self, identity_model):
        config = OfdmConfig()
        with pytest.raises(ValueError):
            probe_ber(config, identity_model, n_bits=5000)

    def test_binomial_consistency_against_long_run(self, identity_model):
        """A short probe lands within 3 standard errors of a long one."""
        config = OfdmConfig(n_subcarriers=256)
        model = dataclasses.replace(identity_model, noise_density=1.2e-7)
        short = probe_ber(config, model, seed=1, n_bits=100_000).ber
        long = probe_ber(config, model, seed=2, n_bits=10_000_000).ber
        stderr = (long * (1 - long) / 100_000) ** 0.5
        assert abs(short - long) <= 3 * stderr


class TestRunImageLink:
    def test_identity_link_is_transparent(self, portrait, identity_model):
        descriptor = builtin_baseline_descriptor(width=64, height=64)
        image = portrait[96:160, 96:160].copy()
        reconstructed, metrics = run_image_link(image, descriptor,
                                                OfdmConfig(qam_order=4),
                                                identity_model, seed=0)
        oracle = baseline_decode(baseline_encode(image), 64, 64)
        assert metrics.measured_ber == 0.0
        assert metrics.bit_errors == 0
        assert np.array_equal(reconstructed, oracle)
        assert metrics.psnr_db == psnr(image, oracle)
        assert metrics.bits_sent == descriptor.bits_per_image

    def test_same_seed_reproduces_reconstruction(self, portrait,
                                                 identity_model):
        descriptor = builtin_baseline_descriptor(width=64, height=64)
        image = portrait[:64, :64].copy()
        model = dataclasses.replace(identity_model, noise_density=2e-6)
        config = OfdmConfig()
        first, metrics_a = run_image_link(image, descriptor, config, model,
                                          seed=9)
        second, metrics_b = run_image_link(image, descriptor, config, model,
                                           seed=9)
        assert np.array_equal(first, second)
        assert metrics_a == metrics_b

    def test_mean_psnr_nonincreasing_in_noise(self, portrait, identity_model):
        descriptor = builtin_baseline_descriptor(width=64, height=64)
        image = portrait[96:160, 96:160].copy()
        config = OfdmConfig(qam_order=16)
        means = []
        for density in (2e-7, 1.2e-6, 6e-6):
            model = dataclasses.replace(identity_model, noise_density=density)
            values = []
            for seed in range(20):
                seeded = dataclasses.replace(model, seed=seed)
                _, metrics = run_image_link(image, descriptor, config, seeded,
                                            seed=seed)
                values.append(min(metrics.psnr_db, 60.0))
            means.append(np.mean(values))
        assert means[0] >= means[1] >= means[2]
