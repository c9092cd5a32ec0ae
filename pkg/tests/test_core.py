"""Shared types: bases, states, model parameters, spectrum containers."""

import numpy as np
import pytest

from mqcecho.core import (
    BasisKind,
    BasisMismatchError,
    FotocCurve,
    ModelKind,
    ModelSpec,
    MqcSpectrum,
    ResourceLimitError,
    SpectrumKind,
    SpinBasis,
    StateVector,
    inner_product,
    overlap_fidelity,
    popcount,
    state_fidelity,
    uniform_phi_grid,
)


class TestSpinBasis:
    def test_dimensions(self):
        assert SpinBasis(BasisKind.DICKE_Z, 10).dimension == 11
        assert SpinBasis(BasisKind.BITSTRING, 10).dimension == 1024

    def test_dicke_labels_ascending(self):
        labels = SpinBasis(BasisKind.DICKE_Z, 4).sz_labels()
        np.testing.assert_array_equal(labels, [-2.0, -1.0, 0.0, 1.0, 2.0])

    def test_bitstring_labels_count_down_bits(self):
        labels = SpinBasis(BasisKind.BITSTRING, 3).sz_labels()
        # index 0 is all sigma^z = +1, index 7 all -1
        assert labels[0] == 1.5 and labels[7] == -1.5
        assert labels[0b101] == -0.5

    def test_too_few_spins(self):
        with pytest.raises(ValueError):
            SpinBasis(BasisKind.DICKE_Z, 1)

    def test_bitstring_cap(self):
        with pytest.raises(ResourceLimitError):
            SpinBasis(BasisKind.BITSTRING, 25)
        # the collective basis is linear in N, so no cap applies
        assert SpinBasis(BasisKind.DICKE_Z, 500).dimension == 501


class TestPopcount:
    def test_small_values(self):
        np.testing.assert_array_equal(
            popcount(np.arange(8), 3), [0, 1, 1, 2, 1, 2, 2, 3]
        )


def _uniform_state(dim):
    basis = SpinBasis(BasisKind.BITSTRING, int(np.log2(dim)))
    return StateVector(basis, np.full(dim, 1.0 / np.sqrt(dim), dtype=complex))


class TestStateVector:
    def test_norm_enforced(self):
        basis = SpinBasis(BasisKind.DICKE_Z, 2)
        with pytest.raises(ValueError):
            StateVector(basis, np.array([0.5, 0.5, 0.5]))

    def test_shape_enforced(self):
        basis = SpinBasis(BasisKind.DICKE_Z, 2)
        with pytest.raises(ValueError):
            StateVector(basis, np.array([1.0, 0.0]))

    def test_amplitudes_frozen(self):
        state = _uniform_state(4)
        with pytest.raises(ValueError):
            state.amplitudes[0] = 1.0

    def test_cast_to_complex(self):
        basis = SpinBasis(BasisKind.DICKE_Z, 2)
        state = StateVector(basis, np.array([1.0, 0.0, 0.0]))
        assert state.amplitudes.dtype == np.complex128


class TestOverlaps:
    def test_inner_product_conjugate_linear(self):
        basis = SpinBasis(BasisKind.DICKE_Z, 2)
        a = StateVector(basis, np.array([1.0, 0.0, 0.0]))
        b = StateVector(basis, np.array([1j, 0.0, 0.0]))
        assert inner_product(a, b) == pytest.approx(1j)
        assert inner_product(b, a) == pytest.approx(-1j)

    def test_fidelity_conventions(self):
        basis = SpinBasis(BasisKind.DICKE_Z, 2)
        a = StateVector(basis, np.array([1.0, 0.0, 0.0]))
        c = StateVector(basis, np.sqrt([0.5, 0.5, 0.0]))
        # state_fidelity is the amplitude |<a|b>|, overlap_fidelity its square
        assert state_fidelity(a, c) == pytest.approx(np.sqrt(0.5), rel=1e-14)
        assert overlap_fidelity(a, c) == pytest.approx(0.5, rel=1e-14)
        assert state_fidelity(a, c) ** 2 == pytest.approx(overlap_fidelity(a, c))

    def test_basis_mismatch(self):
        a = StateVector(SpinBasis(BasisKind.DICKE_Z, 2), np.array([1.0, 0, 0]))
        b = StateVector(SpinBasis(BasisKind.DICKE_Z, 3), np.array([1.0, 0, 0, 0]))
        with pytest.raises(BasisMismatchError):
            inner_product(a, b)


class TestModelSpec:
    def test_g_is_omega_over_chi(self):
        spec = ModelSpec(ModelKind.TFI, 8, omega=1.4, chi=2.0)
        assert spec.g == pytest.approx(0.7)

    def test_with_omega(self):
        spec = ModelSpec(ModelKind.LMG, 50, omega=2.0)
        moved = spec.with_omega(0.5)
        assert moved.omega == 0.5 and moved.n_spins == 50
        assert spec.omega == 2.0

    def test_basis_kind_follows_model(self):
        assert ModelSpec(ModelKind.LMG, 6, omega=1.0).basis.kind is BasisKind.DICKE_Z
        assert ModelSpec(ModelKind.TFI, 6, omega=1.0).basis.kind is BasisKind.BITSTRING

    def test_gamma_only_for_annni(self):
        with pytest.raises(ValueError):
            ModelSpec(ModelKind.TFI, 8, omega=1.0, gamma=0.3)
        ModelSpec(ModelKind.ANNNI, 8, omega=1.0, gamma=0.3)

    def test_disorder_only_for_rfti(self):
        with pytest.raises(ValueError):
            ModelSpec(ModelKind.TFI, 8, omega=1.0, disorder_sigma=0.1)
        with pytest.raises(ValueError):
            ModelSpec(ModelKind.RFTI, 4, omega=1.0, disorder_fields=(0.1, 0.2))

    def test_lattice_size_cap(self):
        with pytest.raises(ResourceLimitError):
            ModelSpec(ModelKind.TFI, 30, omega=1.0)
        ModelSpec(ModelKind.LMG, 2000, omega=1.0)


class TestMqcSpectrum:
    def test_orders_must_be_symmetric_range(self):
        with pytest.raises(ValueError):
            MqcSpectrum(np.array([0, 1, 2]), np.ones(3) / 3, SpectrumKind.ANALYTIC)

    def test_intensity_accessor(self):
        spec = MqcSpectrum(
            np.arange(-2, 3), np.array([0.1, 0.2, 0.4, 0.2, 0.1]),
            SpectrumKind.ANALYTIC,
        )
        assert spec.m_max == 2
        assert spec.intensity(-2) == pytest.approx(0.1)
        assert spec.intensity(0) == pytest.approx(0.4)
        with pytest.raises(ValueError):
            spec.intensity(3)

    def test_analytic_gates_are_tight(self):
        orders = np.arange(-1, 2)
        with pytest.raises(ValueError):
            MqcSpectrum(orders, np.array([0.2, 0.6, 0.2 + 1e-6j]),
                        SpectrumKind.ANALYTIC)
        with pytest.raises(ValueError):
            MqcSpectrum(orders, np.array([0.2, 0.6, -1e-6]), SpectrumKind.ANALYTIC)
        with pytest.raises(ValueError):
            MqcSpectrum(orders, np.array([0.2, 0.6, 0.2001]), SpectrumKind.ANALYTIC)

    def test_echo_gates_absorb_propagator_error(self):
        # a simulated echo may carry ~1e-7 numerical residue; analytic may not
        orders = np.arange(-1, 2)
        vals = np.array([0.2, 0.6, 0.2 - 1e-7])
        MqcSpectrum(orders, vals, SpectrumKind.TRUE_ECHO)
        with pytest.raises(ValueError):
            MqcSpectrum(orders, vals, SpectrumKind.ANALYTIC)

    def test_pseudo_echo_may_be_complex_and_asymmetric(self):
        orders = np.arange(-1, 2)
        MqcSpectrum(orders, np.array([0.1 + 0.2j, 0.5, 0.3 - 0.1j]),
                    SpectrumKind.PSEUDO_ECHO)

    def test_sum_checked_against_fotoc_at_zero(self):
        orders = np.arange(-1, 2)
        MqcSpectrum(orders, np.array([0.25, 0.5, 0.25]), SpectrumKind.ANALYTIC,
                    fotoc_at_zero=1.0)
        with pytest.raises(ValueError):
            MqcSpectrum(orders, np.array([0.25, 0.5, 0.25]),
                        SpectrumKind.ANALYTIC, fotoc_at_zero=0.9)

    def test_arrays_frozen(self):
        spec = MqcSpectrum(np.arange(-1, 2), np.array([0.25, 0.5, 0.25]),
                           SpectrumKind.ANALYTIC)
        with pytest.raises(ValueError):
            spec.intensities[0] = 1.0


class TestFotocCurve:
    def test_range_enforced(self):
        phis = np.linspace(0, 1, 5)
        with pytest.raises(ValueError):
            FotocCurve(phis, np.array([1.0, 0.5, 1.2, 0.5, 0.3]))

    def test_echo_kind_loosens_range(self):
        phis = np.linspace(0, 1, 3)
        vals = np.array([1.0, 0.5, -1e-8])
        FotocCurve(phis, vals, SpectrumKind.TRUE_ECHO)
        with pytest.raises(ValueError):
            FotocCurve(phis, vals)

    def test_unit_at_zero_for_echo_and_analytic(self):
        phis = np.array([0.0, 0.5])
        with pytest.raises(ValueError):
            FotocCurve(phis, np.array([0.9, 0.5]), SpectrumKind.ANALYTIC)
        # pseudo-echo signals need not return to 1 at phi = 0
        FotocCurve(phis, np.array([0.9, 0.5]), SpectrumKind.PSEUDO_ECHO)

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            FotocCurve(np.array([0.0, 1.0]), np.array([1.0]))


class TestPhiGrid:
    def test_uniform_open_interval(self):
        grid = uniform_phi_grid(8)
        assert grid[0] == 0.0
        assert grid.size == 8
        np.testing.assert_allclose(np.diff(grid), np.pi / 4, atol=1e-15)
        assert grid[-1] < 2 * np.pi

    def test_needs_a_point(self):
        with pytest.raises(ValueError):
            uniform_phi_grid(0)
