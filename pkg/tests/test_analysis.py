"""Spectrum transforms, widths, peak location, scaling fits, averaging."""

import numpy as np
import pytest

from mqcecho import analysis, lmg, tfi
from mqcecho.analysis import (
    DerivativeScan,
    PeakSide,
    disorder_average,
    fit_power_law,
    intensities_from_fotoc,
    locate_peak,
    peak_from_samples,
    prominence_ratio,
    qfi_lower_bound,
    refine_peak,
    second_derivative_scan,
    spectrum_width,
)
from mqcecho.core import (
    BasisKind,
    FotocCurve,
    ModelKind,
    ModelSpec,
    MqcSpectrum,
    SpectrumKind,
    SpinBasis,
    StateVector,
    uniform_phi_grid,
)


def _ghz(n):
    amps = np.zeros(n + 1)
    amps[0] = amps[-1] = 1.0 / np.sqrt(2.0)
    return StateVector(SpinBasis(BasisKind.DICKE_Z, n), amps)


class TestIntensitiesFromFotoc:
    def test_cosine_squared_curve(self):
        # cos^2 phi = 1/2 + (e^{2 i phi} + e^{-2 i phi})/4
        phis = uniform_phi_grid(16)
        curve = FotocCurve(phis, np.cos(phis) ** 2)
        spec = intensities_from_fotoc(curve, m_max=3)
        assert spec.intensity(0) == pytest.approx(0.5, abs=1e-14)
        assert spec.intensity(2) == pytest.approx(0.25, abs=1e-14)
        assert spec.intensity(-2) == pytest.approx(0.25, abs=1e-14)
        assert abs(spec.intensity(1)) < 1e-14
        assert abs(spec.intensity(3)) < 1e-14

    def test_round_trip_from_known_spectrum(self):
        ref = tfi.critical_spectrum(8)
        k = 2 * 8 + 2
        phis = uniform_phi_grid(k)
        # resynthesize F(phi) = sum_m I_m e^{-i m phi} and transform back
        orders = ref.orders
        values = np.real(
            np.exp(-1j * np.outer(phis, orders)) @ ref.intensities
        )
        curve = FotocCurve(phis, np.clip(values, 0.0, 1.0))
        spec = intensities_from_fotoc(curve, m_max=8)
        np.testing.assert_allclose(
            spec.intensities, ref.intensities, atol=1e-10
        )

    def test_rejects_nonuniform_grid(self):
        phis = np.array([0.0, 0.5, 1.0, 4.0])
        with pytest.raises(ValueError):
            intensities_from_fotoc(FotocCurve(phis, np.ones(4)))

    def test_rejects_aliasing(self):
        curve = FotocCurve(uniform_phi_grid(9), np.ones(9))
        with pytest.raises(ValueError):
            intensities_from_fotoc(curve, m_max=5)
        intensities_from_fotoc(curve, m_max=4)

    def test_default_m_max_is_alias_free_limit(self):
        curve = FotocCurve(uniform_phi_grid(11), np.ones(11))
        assert intensities_from_fotoc(curve).m_max == 5

    def test_kind_follows_curve_unless_overridden(self):
        phis = uniform_phi_grid(8)
        vals = np.full(8, 0.5)
        tagged = FotocCurve(phis, vals, kind=SpectrumKind.PSEUDO_ECHO)
        assert intensities_from_fotoc(tagged).kind is SpectrumKind.PSEUDO_ECHO
        assert intensities_from_fotoc(
            tagged, kind=SpectrumKind.TRUE_ECHO
        ).kind is SpectrumKind.TRUE_ECHO


class TestWidthAndQfi:
    def test_cosine_squared_width(self):
        curve = FotocCurve(uniform_phi_grid(16), np.cos(uniform_phi_grid(16)) ** 2)
        spec = intensities_from_fotoc(curve, m_max=3)
        assert spectrum_width(spec) == pytest.approx(np.sqrt(2.0), abs=1e-12)
        assert qfi_lower_bound(spec) == pytest.approx(4.0, abs=1e-12)

    @pytest.mark.parametrize("n", [50, 100, 200])
    def test_ghz_width(self, n):
        # a z-basis cat has Var(S_x) = N/4, so sigma = sqrt(N/2)
        spec = lmg.DickeSpace(n).mqc_spectrum(_ghz(n))
        assert spectrum_width(spec) == pytest.approx(
            np.sqrt(n / 2.0), rel=0.02
        )
        assert qfi_lower_bound(spec) == pytest.approx(float(n), rel=0.04)

    def test_width_squared_is_twice_sx_variance(self):
        space = lmg.DickeSpace(40)
        state = lmg.lmg_even_ground_state(40, 1.25)
        w = space.x_weights(state)
        m = space.m_labels
        var = float(w @ m**2 - (w @ m) ** 2)
        spec = space.mqc_spectrum(state)
        assert spectrum_width(spec) ** 2 == pytest.approx(2 * var, abs=1e-10)


class TestSecondDerivativeScan:
    def test_quadratic_is_exact(self):
        scan = second_derivative_scan(lambda x: 3.0 * x**2 - x + 2.0,
                                      np.linspace(0.5, 1.5, 7), fd_step=1e-4)
        np.testing.assert_allclose(scan.second_derivative, 6.0, atol=1e-5)
        np.testing.assert_allclose(
            scan.values, 3.0 * scan.omegas**2 - scan.omegas + 2.0, atol=1e-12
        )
        assert scan.fd_step == 1e-4

    def test_rejects_bad_step(self):
        with pytest.raises(ValueError):
            second_derivative_scan(lambda x: x, [0.0, 1.0], fd_step=0.0)


class TestPeakLocation:
    def test_quadratic_vertex_is_exact(self):
        xs = np.linspace(0.0, 2.0, 9)
        ys = -((xs - 0.77) ** 2) + 5.0
        est = peak_from_samples(xs, ys)
        assert est.position == pytest.approx(0.77, abs=1e-12)
        assert est.height == pytest.approx(5.0, abs=1e-12)

    def test_affine_invariance(self):
        xs = np.linspace(1.0, 3.0, 11)
        ys = np.exp(-((xs - 2.13) ** 2) / 0.3)
        base = peak_from_samples(xs, ys)
        scaled = peak_from_samples(4.0 * xs - 1.0, 7.0 * ys + 2.0)
        assert scaled.position == pytest.approx(4.0 * base.position - 1.0,
                                                abs=1e-10)
        assert scaled.height == pytest.approx(7.0 * base.height + 2.0,
                                              abs=1e-10)

    def test_boundary_maximum_raises(self):
        xs = np.linspace(0.0, 1.0, 5)
        with pytest.raises(ValueError):
            peak_from_samples(xs, xs)

    def test_tied_maximum_counts_as_boundary(self):
        # argmax picks the first of equal samples, so an all-flat scan has
        # no interior bracket
        with pytest.raises(ValueError):
            peak_from_samples([0.0, 1.0, 2.0], [1.0, 1.0, 1.0])

    def test_plateau_vertex_stays_inside(self):
        est = peak_from_samples([0.0, 1.0, 2.0, 3.0], [0.0, 1.0, 1.0, 0.0])
        assert 1.0 < est.position < 2.0
        assert est.height >= 1.0

    def test_locate_peak_sides(self):
        omegas = np.linspace(0.0, 2.0, 21)
        vals = np.zeros_like(omegas)
        d2 = -np.exp(-((omegas - 1.3) ** 2) / 0.02)
        scan = DerivativeScan(omegas, vals, d2, 1e-4)
        est = locate_peak(scan, side=PeakSide.NEGATIVE)
        assert est.position == pytest.approx(1.3, abs=1e-3)
        assert est.height < 0.0
        flipped = DerivativeScan(omegas, vals, -d2, 1e-4)
        pos = locate_peak(flipped)
        assert pos.position == pytest.approx(1.3, abs=1e-3)
        assert pos.height > 0.0

    def test_refine_peak_converges_on_lorentzian(self):
        fn = lambda x: 1.0 / (1.0 + ((x - 0.921) / 0.05) ** 2)
        est = refine_peak(fn, 0.5, 1.5, points=11, rounds=3)
        assert est.position == pytest.approx(0.921, abs=1e-4)
        assert est.height == pytest.approx(1.0, abs=1e-5)

    def test_refine_peak_validation(self):
        with pytest.raises(ValueError):
            refine_peak(lambda x: x, 0.0, 1.0, points=3)
        with pytest.raises(ValueError):
            refine_peak(lambda x: x, 0.0, 1.0, rounds=0)


class TestPowerLawFit:
    def test_exact_power_law(self):
        sizes = np.array([50.0, 100.0, 200.0, 400.0, 800.0])
        fit = fit_power_law(sizes, 3.0 * sizes**-0.65)
        assert fit.exponent == pytest.approx(-0.65, abs=1e-12)
        assert fit.amplitude == pytest.approx(3.0, rel=1e-12)
        assert fit.exponent_stderr == pytest.approx(0.0, abs=1e-12)
        assert fit.window == (50.0, 800.0)

    def test_stderr_reflects_scatter(self):
        rng = np.random.default_rng(3)
        sizes = np.geomspace(10, 1000, 8)
        noisy = 2.0 * sizes**1.5 * np.exp(rng.normal(0, 0.05, 8))
        fit = fit_power_law(sizes, noisy)
        assert fit.exponent == pytest.approx(1.5, abs=0.1)
        assert 0.0 < fit.exponent_stderr < 0.1

    def test_validation(self):
        with pytest.raises(ValueError):
            fit_power_law([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
        with pytest.raises(ValueError):
            fit_power_law([1.0, 2.0, 3.0, -4.0], [1.0, 2.0, 3.0, 4.0])
        with pytest.raises(ValueError):
            fit_power_law([1.0, 2.0, 3.0, 4.0], [1.0, 2.0, 0.0, 4.0])


def _toy_spectrum(i0, i2, kind=SpectrumKind.TRUE_ECHO):
    i1 = (1.0 - i0 - 2 * i2) / 2.0
    vals = np.array([i2, i1, i0, i1, i2])
    return MqcSpectrum(np.arange(-2, 3), vals, kind)


class TestDisorderAverage:
    def test_single_realization_is_identity(self):
        spec = _toy_spectrum(0.5, 0.1)
        avg = disorder_average([spec])
        np.testing.assert_allclose(avg.mean_intensities, spec.intensities)
        np.testing.assert_allclose(avg.sem, 0.0)
        assert avg.n_realizations == 1

    def test_mean_and_sem(self):
        specs = [_toy_spectrum(0.4, 0.1), _toy_spectrum(0.6, 0.2),
                 _toy_spectrum(0.5, 0.15)]
        avg = disorder_average(specs)
        assert avg.mean_intensities[2].real == pytest.approx(0.5)
        i0s = np.array([0.4, 0.6, 0.5])
        assert avg.sem[2] == pytest.approx(i0s.std(ddof=1) / np.sqrt(3))
        mean_spec = avg.mean_spectrum()
        assert mean_spec.intensity(0) == pytest.approx(0.5)

    def test_commutes_with_fourier_transform(self):
        rng = np.random.default_rng(11)
        phis = uniform_phi_grid(12)
        curves = []
        specs = []
        for _ in range(5):
            w = rng.dirichlet(np.ones(4))
            m = np.array([-3, -1, 1, 3])
            # a genuine pure-state FOTOC: weights sum to 1, so F(0) = 1
            vals = np.abs(np.exp(-1j * np.outer(phis, m)) @ w) ** 2
            curves.append(vals)
            specs.append(intensities_from_fotoc(
                FotocCurve(phis, vals), m_max=5
            ))
        avg_of_spectra = disorder_average(specs).mean_intensities
        mean_curve = FotocCurve(phis, np.mean(curves, axis=0),
                                kind=SpectrumKind.TRUE_ECHO)
        spectrum_of_avg = intensities_from_fotoc(mean_curve, m_max=5)
        np.testing.assert_allclose(
            avg_of_spectra, spectrum_of_avg.intensities, atol=1e-12
        )

    def test_grid_mismatch_rejected(self):
        a = _toy_spectrum(0.5, 0.1)
        b = MqcSpectrum(np.arange(-1, 2), np.array([0.25, 0.5, 0.25]),
                        SpectrumKind.TRUE_ECHO)
        with pytest.raises(ValueError):
            disorder_average([a, b])
        with pytest.raises(ValueError):
            disorder_average([])


class TestProminence:
    def test_sharp_peak_scores_high(self):
        xs = np.linspace(0, 1, 41)
        ys = 0.05 * np.sin(9 * xs) + np.exp(-((xs - 0.5) / 0.02) ** 2)
        assert prominence_ratio(ys) > 5.0

    def test_smooth_background_scores_low(self):
        xs = np.linspace(0, 1, 41)
        assert prominence_ratio(0.1 * xs**2) < 5.0

    def test_zero_spread_is_infinite(self):
        ys = np.zeros(20)
        ys[10] = 1.0
        assert prominence_ratio(ys) == np.inf

    def test_short_scan_rejected(self):
        with pytest.raises(ValueError):
            prominence_ratio(np.ones(6))


class TestScanOnPhysicalCurve:
    def test_lmg_transition_peak(self):
        # the finite-size precursor of the critical point shows up as a
        # positive second-derivative peak of I_0 just below omega = chi
        n = 60

        def i0(om):
            state = lmg.lmg_even_ground_state(n, om)
            w = lmg.DickeSpace(n).x_weights(state)
            return float(w @ w)

        scan = second_derivative_scan(i0, np.linspace(0.7, 1.1, 17),
                                      fd_step=1e-4)
        est = locate_peak(scan, side=PeakSide.POSITIVE)
        assert 0.8 < est.position < 1.0
        assert prominence_ratio(scan.second_derivative) > 5.0
