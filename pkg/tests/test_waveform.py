"""OFDM transmit waveform: grids, Hermitian synthesis, clipping, biasing."""

import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rydberg_ofdm import (
    RATE_48K,
    RATE_384K,
    BlockPilots,
    CombPilots,
    FixedSigma,
    OfdmConfig,
    PeakSafe,
    bits_per_symbol,
    build_grid,
    clip,
    hermitian_extend,
    modulate,
    papr,
    pilot_mask,
    pilot_values,
    qam_map,
)

N_VALUES = (256, 512, 1024)


def random_grid(config, symbol_index=0, seed=0):
    rng = np.random.Generator(np.random.PCG64(seed))
    mask = pilot_mask(config, symbol_index)
    n_data = int((~mask).sum())
    bits = rng.integers(0, 2, size=n_data * bits_per_symbol(config.qam_order),
                        dtype=np.uint8)
    return build_grid(qam_map(bits, config.qam_order), config, symbol_index)


class TestOfdmConfig:
    @pytest.mark.parametrize("n", N_VALUES)
    def test_cp_is_eighth_of_subcarriers(self, n):
        config = OfdmConfig(n_subcarriers=n)
        assert config.cp_len_baseband == n // 8
        assert config.cp_len_stream == 4 * (n // 8)

    @pytest.mark.parametrize("n", N_VALUES)
    def test_usable_bin_count(self, n):
        assert OfdmConfig(n_subcarriers=n).n_usable == n // 2 - 1

    def test_frame_length_example(self):
        config = OfdmConfig(n_subcarriers=256)
        assert config.frame_len == 4 * (256 + 32) == 1152
        assert config.body_len == 4 * 256

    @pytest.mark.parametrize("n", [128, 2048, 300, 0])
    def test_unsupported_subcarrier_count_rejected(self, n):
        with pytest.raises(ValueError):
            OfdmConfig(n_subcarriers=n)

    @pytest.mark.parametrize("order", [8, 32, 2])
    def test_unsupported_qam_order_rejected(self, order):
        with pytest.raises(ValueError):
            OfdmConfig(qam_order=order)

    def test_oversampling_fixed_at_four(self):
        assert OfdmConfig().oversampling == 4
        with pytest.raises(ValueError):
            OfdmConfig(oversampling=2)

    def test_carrier_label(self):
        assert OfdmConfig().carrier_hz == 2.911e9

    def test_sample_rate_labels(self):
        assert RATE_48K.stream_hz == 4 * 48_000
        assert RATE_384K.stream_hz == 4 * 384_000
        assert RATE_48K.baseband_hz == 48_000
        assert RATE_384K.baseband_hz == 384_000


class TestPilotLayout:
    def test_comb_layout_n256(self):
        config = OfdmConfig(n_subcarriers=256, pilot_scheme=CombPilots())
        mask = pilot_mask(config, symbol_index=3)
        assert mask.shape == (127,)
        assert int(mask.sum()) == 32
        assert np.array_equal(np.nonzero(mask)[0], np.arange(0, 125, 4))

    @pytest.mark.parametrize("n", N_VALUES)
    def test_comb_count_closed_form(self, n):
        config = OfdmConfig(n_subcarriers=n, pilot_scheme=CombPilots())
        k = config.n_usable
        assert int(pilot_mask(config, 0).sum()) == math.ceil(k / 4)

    def test_block_pilot_symbol_is_all_pilots(self):
        config = OfdmConfig(n_subcarriers=1024, pilot_scheme=BlockPilots())
        mask = pilot_mask(config, symbol_index=4)
        assert mask.shape == (511,)
        assert mask.all()

    def test_block_data_symbol_has_no_pilots(self):
        config = OfdmConfig(n_subcarriers=1024, pilot_scheme=BlockPilots())
        assert not pilot_mask(config, symbol_index=5).any()

    def test_block_pilot_symbols_at_period_multiples(self):
        config = OfdmConfig(pilot_scheme=BlockPilots())
        for index in range(12):
            mask = pilot_mask(config, index)
            assert mask.all() == (index % 4 == 0)
            assert mask.any() == (index % 4 == 0)

    def test_pilot_values_deterministic(self):
        config = OfdmConfig(pilot_scheme=CombPilots())
        a = pilot_values(config, 7)
        b = pilot_values(config, 7)
        assert np.array_equal(a, b)
        assert not np.array_equal(a, pilot_values(config, 8))

    def test_pilot_values_are_unit_qpsk(self):
        config = OfdmConfig(pilot_scheme=CombPilots())
        values = pilot_values(config, 0)
        assert np.allclose(np.abs(values), 1.0, rtol=1e-12)
        assert np.allclose(np.abs(values.real), np.abs(values.imag), rtol=1e-12)


class TestBuildGrid:
    def test_data_symbols_fill_non_pilot_bins(self):
        config = OfdmConfig(n_subcarriers=256, pilot_scheme=CombPilots())
        mask = pilot_mask(config, 0)
        data = np.arange(1, int((~mask).sum()) + 1, dtype=np.complex128)
        grid = build_grid(data, config, 0)
        assert np.array_equal(grid.data_symbols, data)
        assert np.array_equal(grid.usable[mask], pilot_values(config, 0))

    def test_wrong_data_count_rejected(self):
        config = OfdmConfig(n_subcarriers=256)
        with pytest.raises(ValueError):
            build_grid(np.zeros(5, dtype=np.complex128), config, 0)


class TestHermitianExtend:
    def test_zero_grid_gives_zero_spectrum_and_signal(self):
        config = OfdmConfig(n_subcarriers=256)
        grid = build_grid(
            np.zeros(config.n_usable, dtype=np.complex128),
            dataclasses.replace(config, pilot_scheme=BlockPilots()), 1)
        spectrum = hermitian_extend(grid)
        assert not spectrum.any()
        assert not np.fft.ifft(spectrum).any()

    def test_single_bin_gives_cosine(self):
        n = 256
        usable = np.zeros(n // 2 - 1, dtype=np.complex128)
        usable[0] = 1.0
        spectrum = hermitian_extend(usable)
        signal = np.fft.ifft(spectrum)
        t = np.arange(n)
        assert np.allclose(signal.real, 2 / n * np.cos(2 * np.pi * t / n),
                           atol=1e-12)
        assert np.allclose(signal.imag, 0.0, atol=1e-12)

    @pytest.mark.parametrize("n", N_VALUES)
    def test_conjugate_symmetry_exact(self, n):
        config = OfdmConfig(n_subcarriers=n)
        spectrum = hermitian_extend(random_grid(config, seed=n))
        assert spectrum[0] == 0.0
        assert spectrum[n // 2] == 0.0
        for k in (1, 2, n // 4, n // 2 - 1):
            assert spectrum[n - k] == np.conj(spectrum[k])

    @pytest.mark.parametrize("n", N_VALUES)
    def test_real_synthesis_residual(self, n):
        config = OfdmConfig(n_subcarriers=n)
        for seed in range(10):
            signal = np.fft.ifft(hermitian_extend(random_grid(config, seed=seed)))
            peak_re = np.max(np.abs(signal.real))
            assert np.max(np.abs(signal.imag)) < 1e-9 * peak_re


class TestClip:
    def test_within_threshold_is_identity(self):
        samples = np.array([0.5, -0.5, 0.2])
        assert np.array_equal(clip(samples, 10.0), samples)

    def test_hand_computed_example(self):
        samples = np.array([3.0, -3.0, 1.0, -1.0])
        limit = math.sqrt(5.0)
        expected = np.array([limit, -limit, 1.0, -1.0])
        assert np.allclose(clip(samples, 0.0), expected, rtol=1e-12)

    def test_idempotent_with_original_reference(self):
        rng = np.random.Generator(np.random.PCG64(5))
        samples = rng.standard_normal(4096)
        power = float(np.mean(samples * samples))
        once = clip(samples, 3.0)
        twice = clip(once, 3.0, reference_power=power)
        assert np.array_equal(once, twice)

    def test_all_zero_returned_unchanged(self):
        zeros = np.zeros(16)
        assert np.array_equal(clip(zeros, 5.0), zeros)

    def test_energy_never_increases(self):
        rng = np.random.Generator(np.random.PCG64(6))
        samples = rng.standard_normal(4096)
        clipped = clip(samples, 3.0)
        assert np.mean(clipped**2) < np.mean(samples**2)
        gentle = clip(samples, 60.0)
        assert np.array_equal(gentle, samples)

    def test_peak_capped_relative_to_preclip_power(self):
        """The amplitude limit derives from the input power, so the peak of
        the clipped signal stays within threshold_db of that reference."""
        raw_config = OfdmConfig(n_subcarriers=256, clip_threshold_db=200.0,
                                dc_bias_mode=PeakSafe())
        for seed in range(20):
            frame = modulate(random_grid(raw_config, seed=seed), raw_config)
            raw = frame.samples - frame.bias
            clipped = clip(raw, 5.0)
            cap_db = 10 * math.log10(np.max(clipped**2) / np.mean(raw**2))
            assert cap_db <= 5.01

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            clip(np.array([]), 5.0)


class TestPapr:
    def test_constant_signal_is_zero_db(self):
        assert papr(np.full(64, 3.0)) == pytest.approx(0.0, abs=1e-12)

    def test_hand_computed_example(self):
        assert papr(np.array([1.0, 0.0, 0.0, 0.0])) == pytest.approx(
            10 * math.log10(4), rel=1e-12)

    @given(scale=st.floats(-1e6, 1e6).filter(lambda c: abs(c) > 1e-6))
    def test_scaling_invariance(self, scale):
        samples = np.array([1.0, -2.0, 0.5, 3.0])
        assert papr(scale * samples) == pytest.approx(papr(samples), abs=1e-9)

    def test_all_zero_rejected(self):
        with pytest.raises(ValueError):
            papr(np.zeros(8))

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            papr(np.array([]))


class TestModulate:
    def test_zero_grid_gives_constant_frame(self):
        config = OfdmConfig(n_subcarriers=256, pilot_scheme=BlockPilots())
        grid = build_grid(np.zeros(config.n_usable, dtype=np.complex128),
                          config, 1)
        frame = modulate(grid, config)
        assert np.ptp(frame.samples) == 0.0

    @pytest.mark.parametrize("n,expected", [(256, 1152), (512, 2304),
                                            (1024, 4608)])
    def test_frame_length(self, n, expected):
        config = OfdmConfig(n_subcarriers=n)
        frame = modulate(random_grid(config), config)
        assert frame.samples.shape == (expected,)

    def test_cyclic_prefix_copies_body_tail(self):
        config = OfdmConfig(n_subcarriers=256, clip_threshold_db=60.0)
        frame = modulate(random_grid(config, seed=2), config)
        cp = config.cp_len_stream
        assert np.array_equal(frame.samples[:cp], frame.samples[-cp:])

    def test_cyclic_prefix_survives_default_clipping(self):
        config = OfdmConfig(n_subcarriers=256)
        frame = modulate(random_grid(config, seed=3), config)
        cp = config.cp_len_stream
        assert np.array_equal(frame.samples[:cp], frame.samples[-cp:])

    def test_peak_safe_bias_makes_min_exactly_zero(self):
        config = OfdmConfig(n_subcarriers=256, dc_bias_mode=PeakSafe())
        frame = modulate(random_grid(config, seed=4), config)
        assert frame.samples.min() == 0.0
        assert frame.bias > 0.0

    def test_fixed_sigma_bias_keeps_samples_nonnegative(self):
        config = OfdmConfig(n_subcarriers=256, dc_bias_mode=FixedSigma(k=1.0))
        frame = modulate(random_grid(config, seed=5), config)
        assert frame.samples.min() >= 0.0
        assert frame.bias > 0.0

    def test_fixed_sigma_bias_is_k_standard_deviations(self):
        config = OfdmConfig(n_subcarriers=256, clip_threshold_db=60.0,
                            dc_bias_mode=FixedSigma(k=3.0))
        grid = random_grid(config, seed=6)
        reference = modulate(grid, dataclasses.replace(
            config, dc_bias_mode=PeakSafe()))
        clipped = reference.samples - reference.bias
        frame = modulate(grid, config)
        assert frame.bias == pytest.approx(3.0 * float(np.std(clipped)),
                                           rel=1e-12)

    def test_frame_carries_stream_rate(self):
        config = OfdmConfig(sample_rate=RATE_384K)
        frame = modulate(random_grid(config), config)
        assert frame.sample_rate_hz == RATE_384K.stream_hz

    def test_papr_reported_for_clipped_body(self):
        """papr_db diagnoses the clipped pre-bias signal; clipping removes
        tail energy, so the value can sit slightly above the threshold."""
        config = OfdmConfig(n_subcarriers=256)
        frame = modulate(random_grid(config, seed=7), config)
        assert 0.0 < frame.papr_db < 10.0
        loose = OfdmConfig(n_subcarriers=256, clip_threshold_db=200.0)
        unclipped = modulate(random_grid(loose, seed=7), loose)
        assert frame.papr_db < unclipped.papr_db
