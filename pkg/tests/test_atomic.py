"""Atomic receiver model: field conversions, scaling laws, EIT spectra."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rydberg_ofdm import (
    HBAR,
    AtomicLevelScheme,
    EitSpectrum,
    MalformedSpectrumError,
    OperatingPoint,
    RabiField,
    ReadoutMode,
    ScalingProperty,
    UnsplitSpectrumError,
    at_separation,
    atomic_transfer,
    cesium_scheme,
    eit_spectrum,
    estimate_field,
    field_to_rabi,
    rabi_to_field,
    scaling_ratio,
)

TAU = 2 * math.pi


def narrow_scheme(gamma_intermediate=TAU * 0.5e6, gamma_rydberg=TAU * 2e3):
    """Cesium ladder with linewidths small enough to resolve AT splitting."""
    base = cesium_scheme()
    return AtomicLevelScheme(
        ground_label=base.ground_label,
        intermediate_label=base.intermediate_label,
        rydberg1_label=base.rydberg1_label,
        rydberg2_label=base.rydberg2_label,
        n_rydberg1=base.n_rydberg1,
        probe_wavelength_nm=base.probe_wavelength_nm,
        coupling_wavelength_nm=base.coupling_wavelength_nm,
        dipole_moment=base.dipole_moment,
        gamma_intermediate=gamma_intermediate,
        gamma_rydberg=gamma_rydberg,
    )


def narrow_point(scheme):
    return OperatingPoint(probe_rabi=TAU * 0.1e6, coupling_rabi=TAU * 2e6,
                          scheme=scheme)


def spectrum_at(rf_rabi, half_span, step=TAU * 500.0):
    scheme = narrow_scheme()
    grid = np.arange(-half_span, half_span + step / 2, step)
    return eit_spectrum(scheme, narrow_point(scheme), rf_rabi, grid)


class TestFieldConversion:
    def test_zero_omega_gives_zero_field(self):
        assert rabi_to_field(0.0, 1e-26) == 0.0

    def test_hand_computed_field(self):
        field = rabi_to_field(TAU * 1e7, 1e-26)
        assert field == pytest.approx(0.6626, rel=1e-3)
        assert field == pytest.approx(HBAR * TAU * 1e7 / 1e-26, rel=1e-12)

    def test_zero_field_gives_zero_omega(self):
        assert field_to_rabi(0.0, 1e-26) == 0.0

    def test_hand_computed_omega(self):
        assert field_to_rabi(0.6626, 1e-26) == pytest.approx(6.2832e7, rel=1e-4)

    def test_small_dipole_omega(self):
        assert field_to_rabi(1.0, 1e-29) == pytest.approx(9.4825e4, rel=1e-4)

    def test_round_trip_example(self):
        omega = TAU * 1e6
        back = field_to_rabi(rabi_to_field(omega, 1e-26), 1e-26)
        assert back == pytest.approx(omega, rel=1e-12)

    @given(
        omega=st.one_of(st.just(0.0), st.floats(1e-6, TAU * 1e8)),
        dipole=st.floats(1e-30, 1e-25, allow_nan=False),
    )
    def test_round_trip_property(self, omega, dipole):
        back = field_to_rabi(rabi_to_field(omega, dipole), dipole)
        assert abs(back - omega) <= 1e-12 * omega

    @pytest.mark.parametrize("bad", [0.0, -1e-26])
    def test_nonpositive_dipole_rejected(self, bad):
        with pytest.raises(ValueError):
            rabi_to_field(1.0, bad)
        with pytest.raises(ValueError):
            field_to_rabi(1.0, bad)

    def test_negative_inputs_rejected(self):
        with pytest.raises(ValueError):
            rabi_to_field(-1.0, 1e-26)
        with pytest.raises(ValueError):
            field_to_rabi(-1.0, 1e-26)


class TestRabiField:
    def test_consistent_pair_accepted(self):
        omega = TAU * 1e6
        pair = RabiField.from_omega(omega, 1e-26)
        assert pair.field_amplitude == pytest.approx(
            rabi_to_field(omega, 1e-26), rel=1e-12)

    def test_from_field_round_trip(self):
        pair = RabiField.from_field(0.5, 1e-26)
        assert pair.omega == pytest.approx(field_to_rabi(0.5, 1e-26), rel=1e-12)

    def test_inconsistent_pair_rejected(self):
        with pytest.raises(ValueError):
            RabiField(omega=1.0, field_amplitude=1.0, dipole_moment=1e-26)

    def test_negative_values_rejected(self):
        with pytest.raises(ValueError):
            RabiField(omega=-1.0, field_amplitude=0.0, dipole_moment=1e-26)


class TestScalingLaws:
    @pytest.mark.parametrize("prop,expected", [
        (ScalingProperty.ORBITAL_RADIUS, 4.0),
        (ScalingProperty.LIFETIME, 8.0),
        (ScalingProperty.POLARIZABILITY, 128.0),
    ])
    def test_doubling_ratios_exact(self, prop, expected):
        assert scaling_ratio(prop, 31, 62) == expected

    def test_below_rydberg_threshold_rejected(self):
        with pytest.raises(ValueError):
            scaling_ratio(ScalingProperty.LIFETIME, 9, 62)
        with pytest.raises(ValueError):
            scaling_ratio(ScalingProperty.LIFETIME, 31, 9)

    @pytest.mark.parametrize("prop", list(ScalingProperty))
    def test_dyadic_chain_additivity_exact(self, prop):
        left = scaling_ratio(prop, 10, 20) * scaling_ratio(prop, 20, 40)
        assert left == scaling_ratio(prop, 10, 40)
        left = scaling_ratio(prop, 16, 24) * scaling_ratio(prop, 24, 36)
        assert left == scaling_ratio(prop, 16, 36)

    @given(
        prop=st.sampled_from(list(ScalingProperty)),
        a=st.integers(10, 200),
        b=st.integers(10, 200),
        c=st.integers(10, 200),
    )
    def test_additivity_property(self, prop, a, b, c):
        product = scaling_ratio(prop, a, b) * scaling_ratio(prop, b, c)
        direct = scaling_ratio(prop, a, c)
        assert product == pytest.approx(direct, rel=1e-14)

    def test_identity_ratio(self):
        assert scaling_ratio(ScalingProperty.POLARIZABILITY, 62, 62) == 1.0


class TestCesiumScheme:
    def test_level_labels_match_design(self):
        scheme = cesium_scheme()
        assert scheme.ground_label == "6S1/2"
        assert scheme.intermediate_label == "6P3/2"
        assert scheme.rydberg1_label == "62D5/2"
        assert scheme.rydberg2_label == "63P3/2"

    def test_wavelengths(self):
        scheme = cesium_scheme()
        assert scheme.probe_wavelength_nm == 852.0
        assert scheme.coupling_wavelength_nm == 509.0

    def test_principal_quantum_number(self):
        assert cesium_scheme().n_rydberg1 == 62

    def test_low_n_rejected(self):
        base = cesium_scheme()
        kwargs = {f: getattr(base, f) for f in (
            "ground_label", "intermediate_label", "rydberg1_label",
            "rydberg2_label", "probe_wavelength_nm", "coupling_wavelength_nm",
            "dipole_moment", "gamma_intermediate", "gamma_rydberg")}
        with pytest.raises(ValueError):
            AtomicLevelScheme(n_rydberg1=5, **kwargs)

    def test_nonpositive_rates_rejected(self):
        base = cesium_scheme()
        kwargs = {f: getattr(base, f) for f in (
            "ground_label", "intermediate_label", "rydberg1_label",
            "rydberg2_label", "n_rydberg1", "probe_wavelength_nm",
            "coupling_wavelength_nm", "dipole_moment", "gamma_rydberg")}
        with pytest.raises(ValueError):
            AtomicLevelScheme(gamma_intermediate=0.0, **kwargs)


class TestOperatingPoint:
    def test_weak_probe_enforced(self):
        with pytest.raises(ValueError):
            OperatingPoint(probe_rabi=TAU * 3e6, coupling_rabi=TAU * 2e6)

    def test_probe_must_be_positive(self):
        with pytest.raises(ValueError):
            OperatingPoint(probe_rabi=0.0, coupling_rabi=TAU * 2e6)


class TestEitSpectrum:
    def test_zero_rf_single_peak_at_zero(self):
        spec = spectrum_at(0.0, TAU * 3e6)
        peak = spec.detunings[np.argmax(spec.transmission)]
        assert abs(peak) < TAU * 1e3
        with pytest.raises(UnsplitSpectrumError):
            at_separation(spec)

    def test_split_separation_matches_rf_rabi(self):
        rf = TAU * 5e6
        spec = spectrum_at(rf, TAU * 4e6)
        assert at_separation(spec) == pytest.approx(rf, rel=0.02)

    def test_small_rf_broadens_single_peak(self):
        scheme = narrow_scheme(gamma_rydberg=TAU * 0.2e6)
        point = OperatingPoint(probe_rabi=TAU * 0.1e6, coupling_rabi=TAU * 2e6,
                               scheme=scheme)
        grid = np.arange(-TAU * 3e6, TAU * 3e6, TAU * 1e3)

        def center_peak_width(rf):
            """Half-prominence width of the transparency peak at zero detuning."""
            t = eit_spectrum(scheme, point, rf, grid).transmission
            central = np.nonzero(np.abs(grid) <= TAU * 0.5e6)[0]
            i0 = central[np.argmax(t[central])]
            lo = i0
            while lo > 0 and t[lo - 1] <= t[lo]:
                lo -= 1
            hi = i0
            while hi < t.size - 1 and t[hi + 1] <= t[hi]:
                hi += 1
            level = max(t[lo], t[hi]) + 0.5 * (t[i0] - max(t[lo], t[hi]))
            a = i0
            while a > 0 and t[a - 1] >= level:
                a -= 1
            b = i0
            while b < t.size - 1 and t[b + 1] >= level:
                b += 1
            return grid[b] - grid[a]

        assert center_peak_width(TAU * 30e3) > center_peak_width(0.0)

    def test_transmission_bounded(self):
        spec = spectrum_at(TAU * 5e6, TAU * 4e6)
        assert np.all(spec.transmission >= 0.0)
        assert np.all(spec.transmission <= 1.0)

    def test_symmetry_on_symmetric_grid(self):
        spec = spectrum_at(TAU * 5e6, TAU * 4e6)
        assert np.allclose(spec.transmission, spec.transmission[::-1],
                           atol=1e-9, rtol=0)

    def test_non_monotone_grid_rejected(self):
        scheme = narrow_scheme()
        with pytest.raises(ValueError):
            eit_spectrum(scheme, narrow_point(scheme), 0.0,
                         np.array([0.0, 1.0, 0.5]))

    def test_empty_grid_rejected(self):
        scheme = narrow_scheme()
        with pytest.raises(ValueError):
            eit_spectrum(scheme, narrow_point(scheme), 0.0, np.array([]))

    def test_peak_count_transition_is_monotone(self):
        split_seen = False
        for k in range(1, 41):
            rf = TAU * 0.25e6 * k
            spec = spectrum_at(rf, rf / 2 + TAU * 2e6)
            try:
                at_separation(spec)
                split_seen = True
            except UnsplitSpectrumError:
                assert not split_seen, f"splitting reverted at rf={rf}"


class TestAtSeparation:
    def test_doubling_rf_doubles_separation(self):
        rf = TAU * 4e6
        sep1 = at_separation(spectrum_at(rf, TAU * 4e6))
        sep2 = at_separation(spectrum_at(2 * rf, TAU * 7e6))
        assert sep2 == pytest.approx(2 * sep1, rel=0.02)

    def test_flat_spectrum_rejected(self):
        flat = EitSpectrum(detunings=np.linspace(-1.0, 1.0, 11),
                           transmission=np.full(11, 0.5), rf_rabi=0.0)
        with pytest.raises(UnsplitSpectrumError):
            at_separation(flat)

    def test_three_peaks_rejected(self):
        grid = np.linspace(-3.0, 3.0, 601)
        bumps = sum(np.exp(-((grid - c) / 0.2) ** 2) for c in (-2.0, 0.0, 2.0))
        spec = EitSpectrum(detunings=grid, transmission=0.9 * bumps / bumps.max(),
                           rf_rabi=1.0)
        with pytest.raises(MalformedSpectrumError):
            at_separation(spec)


class TestEstimateField:
    def test_recovers_field_from_splitting(self):
        rf = TAU * 5e6
        spec = spectrum_at(rf, TAU * 4e6)
        expected = rabi_to_field(rf, 1e-26)
        assert expected == pytest.approx(0.3313, rel=1e-3)
        assert estimate_field(spec, 1e-26) == pytest.approx(expected, rel=0.02)

    def test_unsplit_spectrum_propagates(self):
        with pytest.raises(UnsplitSpectrumError):
            estimate_field(spectrum_at(0.0, TAU * 3e6), 1e-26)

    def test_monotone_in_rf_rabi(self):
        fields = []
        for k in range(3, 9):
            rf = TAU * 1e6 * k
            spec = spectrum_at(rf, rf / 2 + TAU * 2e6)
            fields.append(estimate_field(spec, 1e-26))
        assert all(b >= a for a, b in zip(fields, fields[1:]))


class TestAtomicTransfer:
    def test_ideal_envelope_zero(self):
        point = OperatingPoint(probe_rabi=TAU * 0.5e6, coupling_rabi=TAU * 3e6)
        assert atomic_transfer(0.0, point) == 0.0

    @pytest.mark.parametrize("amp", [0.1, 1.0, 10.0])
    def test_ideal_envelope_linear(self, amp):
        point = OperatingPoint(probe_rabi=TAU * 0.5e6, coupling_rabi=TAU * 3e6,
                               envelope_gain=2.5)
        assert atomic_transfer(amp, point) == pytest.approx(2.5 * amp, rel=1e-12)

    def test_nonlinear_zero_field_gives_zero(self):
        point = OperatingPoint(probe_rabi=TAU * 0.5e6, coupling_rabi=TAU * 3e6,
                               readout_mode=ReadoutMode.EIT_NONLINEAR)
        assert atomic_transfer(0.0, point) == pytest.approx(0.0, abs=1e-15)

    def test_nonlinear_is_compressive(self):
        point = OperatingPoint(probe_rabi=TAU * 0.5e6, coupling_rabi=TAU * 3e6,
                               readout_mode=ReadoutMode.EIT_NONLINEAR)
        a = rabi_to_field(TAU * 3e6, cesium_scheme().dipole_moment)
        out0 = atomic_transfer(0.0, point)
        out1 = atomic_transfer(a, point)
        out2 = atomic_transfer(2 * a, point)
        assert out2 - out1 < 2 * (out1 - out0)

    def test_nonlinear_monotone_at_small_fields(self):
        point = OperatingPoint(probe_rabi=TAU * 0.5e6, coupling_rabi=TAU * 3e6,
                               readout_mode=ReadoutMode.EIT_NONLINEAR)
        scale = rabi_to_field(TAU * 1e6, cesium_scheme().dipole_moment)
        amps = np.linspace(0.0, 3.0, 16) * scale
        outs = atomic_transfer(amps, point)
        assert np.all(np.diff(outs) > 0)

    def test_negative_amplitude_rejected(self):
        point = OperatingPoint(probe_rabi=TAU * 0.5e6, coupling_rabi=TAU * 3e6)
        with pytest.raises(ValueError):
            atomic_transfer(-0.1, point)

    def test_scalar_in_scalar_out(self):
        point = OperatingPoint(probe_rabi=TAU * 0.5e6, coupling_rabi=TAU * 3e6)
        out = atomic_transfer(1.5, point)
        assert isinstance(out, float)

    def test_array_in_array_out(self):
        point = OperatingPoint(probe_rabi=TAU * 0.5e6, coupling_rabi=TAU * 3e6)
        out = atomic_transfer(np.array([0.0, 1.0, 2.0]), point)
        assert out.shape == (3,)
