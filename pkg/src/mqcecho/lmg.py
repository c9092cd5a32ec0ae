"""Collective-spin (all-to-all Ising) model in the Dicke basis.

H = -(chi/N) Sz^2 - Omega Sx acts on the symmetric spin-N/2 space of
dimension N+1, tridiagonal in the Sz eigenbasis ordered m = -N/2 .. N/2.
Besides ground states, this module carries the exact x-basis rotation
machinery (S_x eigendecomposition), the paramagnetic-phase analytic
intensities from the squeezed-vacuum bosonic approximation, and the
ferromagnetic GHZ spectrum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.special import digamma

from .core import (
    BasisKind,
    ConvergenceError,
    ModelKind,
    ModelSpec,
    MqcSpectrum,
    SpectrumKind,
    SpinBasis,
    StateVector,
)

_GS_RESIDUAL_TOL = 1e-8
_HYP_MAX_TERMS = 1_000_000
_HYP_ARG_LIMIT = 1.0 - 1e-8


def dicke_m_labels(n_spins: int) -> np.ndarray:
    """Sz eigenvalues m = -N/2 .. N/2 in ascending order (length N+1)."""
    return np.arange(n_spins + 1) - n_spins / 2.0


def _sx_ladder(n_spins: int) -> np.ndarray:
    """Off-diagonal of S_x between m and m+1: (1/2) sqrt(S(S+1) - m(m+1))."""
    s = n_spins / 2.0
    m = dicke_m_labels(n_spins)[:-1]
    return 0.5 * np.sqrt(s * (s + 1.0) - m * (m + 1.0))


def _tridiag_apply(diag, off, v):
    out = diag * v
    out[:-1] += off * v[1:]
    out[1:] += off * v[:-1]
    return out


@dataclass(frozen=True)
class LmgHamiltonian:
    """Tridiagonal collective-spin Hamiltonian in the Dicke z-basis."""

    n_spins: int
    chi: float
    omega: float
    diagonal: np.ndarray
    off_diagonal: np.ndarray

    @property
    def matrix(self) -> np.ndarray:
        h = np.diag(self.diagonal)
        idx = np.arange(self.n_spins)
        h[idx, idx + 1] = self.off_diagonal
        h[idx + 1, idx] = self.off_diagonal
        return h

    @property
    def basis(self) -> SpinBasis:
        return SpinBasis(BasisKind.DICKE_Z, self.n_spins)

    def apply(self, amplitudes: np.ndarray) -> np.ndarray:
        """H times a raw amplitude array."""
        if amplitudes.shape != (self.n_spins + 1,):
            raise ValueError(
                f"vector of length {amplitudes.shape} against dimension "
                f"{self.n_spins + 1}"
            )
        return _tridiag_apply(self.diagonal, self.off_diagonal, amplitudes)


def build_lmg(spec: ModelSpec) -> LmgHamiltonian:
    """Assemble -(chi/N) Sz^2 - Omega Sx on the Dicke basis."""
    if spec.model is not ModelKind.LMG:
        raise ValueError(f"expected an LMG model spec, got {spec.model}")
    n = spec.n_spins
    m = dicke_m_labels(n)
    diagonal = -spec.chi * m * m / n
    off_diagonal = -spec.omega * _sx_ladder(n)
    return LmgHamiltonian(n, spec.chi, spec.omega, diagonal, off_diagonal)


def lmg_ground_state(h: LmgHamiltonian) -> StateVector:
    """Lowest eigenvector, normalized, largest amplitude made real positive."""
    try:
        _, vecs = eigh_tridiagonal(
            h.diagonal, h.off_diagonal, select="i", select_range=(0, 0)
        )
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"tridiagonal eigensolver failed: {exc}") from exc
    vec = vecs[:, 0]
    vec = vec / np.linalg.norm(vec)
    energy = vec @ _tridiag_apply(h.diagonal, h.off_diagonal, vec)
    residual = np.linalg.norm(
        _tridiag_apply(h.diagonal, h.off_diagonal, vec) - energy * vec
    )
    if residual > _GS_RESIDUAL_TOL:
        raise ConvergenceError(
            f"ground-state residual {residual:.3e} exceeds {_GS_RESIDUAL_TOL}"
        )
    pivot = int(np.argmax(np.abs(vec)))
    if vec[pivot] < 0.0:
        vec = -vec
    basis = SpinBasis(BasisKind.DICKE_Z, h.n_spins)
    return StateVector(basis, vec.astype(np.complex128))


def lmg_energies(h: LmgHamiltonian, count: int = 2) -> np.ndarray:
    """Lowest `count` eigenvalues of the full (both-parity) Hamiltonian."""
    vals = eigh_tridiagonal(
        h.diagonal, h.off_diagonal, select="i", select_range=(0, count - 1),
        eigvals_only=True,
    )
    return vals


def even_sector_tridiagonal(n_spins: int, omega: float, chi: float = 1.0):
    """Hamiltonian block on reflection-even Dicke states (m <-> -m folded).

    Even N folds onto labels m = 0..S with the m=0 <-> m=1 coupling scaled
    by sqrt(2); odd N folds onto m = 1/2..S and the +-1/2 coupling moves
    onto the first diagonal entry.  Returns (diagonal, off_diagonal).
    """
    s = n_spins / 2.0
    ladder = omega * _sx_ladder(n_spins)  # coupling m <-> m+1, m from -S
    if n_spins % 2 == 0:
        m = np.arange(0, n_spins // 2 + 1, dtype=float)
        diagonal = -chi * m * m / n_spins
        off = -ladder[n_spins // 2:].copy()
        off[0] *= math.sqrt(2.0)
    else:
        m = np.arange(n_spins // 2 + 1, dtype=float) + 0.5
        diagonal = -chi * m * m / n_spins
        diagonal[0] += -0.5 * omega * math.sqrt(s * (s + 1.0) + 0.25)
        off = -ladder[n_spins // 2 + 1:].copy()
    return diagonal, off


def lmg_even_sector_energies(n_spins: int, omega: float, chi: float = 1.0,
                             count: int = 2) -> np.ndarray:
    """Lowest `count` eigenvalues within the reflection-even sector."""
    diagonal, off = even_sector_tridiagonal(n_spins, omega, chi)
    return eigh_tridiagonal(
        diagonal, off, select="i", select_range=(0, count - 1), eigvals_only=True
    )


def lmg_even_ground_state(n_spins: int, omega: float,
                          chi: float = 1.0) -> StateVector:
    """Ground state of the reflection-even sector, unfolded to the full basis.

    Coincides with the global ground state wherever that state is even and
    non-degenerate.  Deep in the ferromagnetic phase the doublet splitting
    drops below floating-point resolution and a full-space diagonalizer
    returns an arbitrary mix of the two wells; the folded solve stays pinned
    to the symmetric superposition, which is the state a parity-preserving
    protocol actually connects to.
    """
    diagonal, off = even_sector_tridiagonal(n_spins, omega, chi)
    try:
        _, vecs = eigh_tridiagonal(diagonal, off, select="i", select_range=(0, 0))
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"tridiagonal eigensolver failed: {exc}") from exc
    f = vecs[:, 0]
    f = f / np.linalg.norm(f)
    amps = np.zeros(n_spins + 1)
    if n_spins % 2 == 0:
        center = n_spins // 2
        amps[center] = f[0]
        amps[center + 1:] = f[1:] / math.sqrt(2.0)
        amps[:center] = amps[center + 1:][::-1]
    else:
        half = (n_spins + 1) // 2
        amps[half:] = f / math.sqrt(2.0)
        amps[:half] = amps[half:][::-1]
    pivot = int(np.argmax(np.abs(amps)))
    if amps[pivot] < 0.0:
        amps = -amps
    basis = SpinBasis(BasisKind.DICKE_Z, n_spins)
    state = StateVector(basis, amps.astype(np.complex128))
    h = build_lmg(ModelSpec(ModelKind.LMG, n_spins, omega=omega, chi=chi))
    hv = _tridiag_apply(h.diagonal, h.off_diagonal, amps)
    energy = amps @ hv
    residual = np.linalg.norm(hv - energy * amps)
    if residual > _GS_RESIDUAL_TOL:
        raise ConvergenceError(
            f"even-sector ground state residual {residual:.3e} exceeds "
            f"{_GS_RESIDUAL_TOL}"
        )
    return state


class DickeSpace:
    """Spin-N/2 space with a cached S_x eigendecomposition.

    S_x is tridiagonal with zero diagonal; its eigenvalues are exactly
    m = -N/2 .. N/2.  The cached orthogonal eigenvector matrix V turns
    exp(-i phi S_x) into elementwise phases and reduces FOTOC / MQC
    evaluation to weight autocorrelations.  Build once per N and reuse:
    the decomposition costs O(N^3), everything after is O(N^2).
    """

    def __init__(self, n_spins: int):
        self.n_spins = int(n_spins)
        self.basis = SpinBasis(BasisKind.DICKE_Z, self.n_spins)
        self.m_labels = dicke_m_labels(self.n_spins)
        evals, vecs = eigh_tridiagonal(
            np.zeros(self.n_spins + 1), _sx_ladder(self.n_spins)
        )
        drift = np.max(np.abs(evals - self.m_labels))
        if drift > 1e-6 * max(1.0, self.n_spins):
            raise ConvergenceError(
                f"S_x eigenvalues off the integer grid by {drift:.3e}"
            )
        self._v = vecs

    def _check(self, state: StateVector):
        if state.basis != self.basis:
            raise ValueError(
                f"state basis {state.basis} does not match DickeSpace(N={self.n_spins})"
            )

    def to_x_basis(self, state: StateVector) -> np.ndarray:
        """Amplitudes in the S_x eigenbasis, ordered by ascending m_x."""
        self._check(state)
        return self._v.T @ state.amplitudes

    def x_weights(self, state: StateVector) -> np.ndarray:
        """Populations over S_x eigenstates (sum to 1)."""
        c = self.to_x_basis(state)
        return np.abs(c) ** 2

    def rotate(self, state: StateVector, phi: float) -> StateVector:
        """Exact application of exp(-i phi S_x)."""
        c = self.to_x_basis(state)
        c = c * np.exp(-1j * phi * self.m_labels)
        return StateVector(self.basis, self._v @ c)

    def fotoc_values(self, state: StateVector, phis) -> np.ndarray:
        """F(phi) = |sum_p w_p exp(-i phi m_p)|^2 from the x-basis weights."""
        w = self.x_weights(state)
        phis = np.atleast_1d(np.asarray(phis, dtype=np.float64))
        amp = np.exp(-1j * np.outer(phis, self.m_labels)) @ w
        return np.abs(amp) ** 2

    def mqc_spectrum(self, state: StateVector, m_max: int | None = None) -> MqcSpectrum:
        """Exact intensities I_m = sum_p w_p w_{p+m} of a pure state."""
        w = self.x_weights(state)
        auto = np.correlate(w, w, mode="full")  # index N + m
        n = self.n_spins
        if m_max is None:
            m_max = n
        m_max = min(m_max, n)
        orders = np.arange(-m_max, m_max + 1)
        intensities = auto[orders + n].astype(np.complex128)
        total = float(auto.sum())  # equals F(0) = (sum_p w_p)^2
        fotoc0 = total if m_max == n else None
        return MqcSpectrum(orders, intensities, SpectrumKind.ANALYTIC,
                           fotoc_at_zero=fotoc0)


def sx_expectation(state: StateVector) -> float:
    """<S_x> of a Dicke-basis state."""
    n = state.basis.n_spins
    ladder = _sx_ladder(n)
    a = state.amplitudes
    return float(2.0 * np.sum(ladder * (np.conj(a[:-1]) * a[1:]).real))


def squeeze_parameter(omega_over_chi: float) -> float:
    """Squeeze r of the paramagnetic vacuum: tanh(2r) = 1/(2 Omega/chi - 1).

    Defined only on the paramagnetic side Omega/chi > 1; r -> 0 in the
    strong-field limit and diverges at the transition.
    """
    g = float(omega_over_chi)
    if g <= 1.0:
        raise ValueError(f"squeezed-vacuum branch needs omega/chi > 1, got {g}")
    return 0.5 * math.atanh(1.0 / (2.0 * g - 1.0))


def _hyp2f1(a: float, b: float, c: float, z: float) -> float:
    """Gauss hypergeometric series, adequate for arguments well inside |z| < 1."""
    if abs(z) >= _HYP_ARG_LIMIT:
        raise ConvergenceError(
            f"hypergeometric argument {z} too close to the unit circle"
        )
    term = 1.0
    total = 1.0
    for k in range(_HYP_MAX_TERMS):
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z
        total += term
        if abs(term) < 1e-15 * abs(total):
            return total
    raise ConvergenceError("hypergeometric series did not converge")


def hp_intensity(m: int, omega_over_chi: float) -> float:
    """Paramagnetic-phase intensity I_m of the collective ground state.

    Squeezed-vacuum result: (1 - t^2) * [m!/(2^m ((m/2)!)^2)] * t^m *
    2F1(1/2, (1+m)/2; (2+m)/2; t^4) with t = tanh(r).  The (1 - t^2)
    prefactor makes the spectrum sum to exactly 1.  Zero for odd m.
    """
    m = abs(int(m))
    if m % 2 == 1:
        return 0.0
    r = squeeze_parameter(omega_over_chi)
    t = math.tanh(r)
    coeff = math.comb(m, m // 2) / (1 << m)
    if t == 0.0:
        return 1.0 if m == 0 else 0.0
    return (1.0 - t * t) * coeff * t**m * _hyp2f1(
        0.5, (1.0 + m) / 2.0, (2.0 + m) / 2.0, t**4
    )


def hp_spectrum(omega_over_chi: float, m_max: int) -> MqcSpectrum:
    """Analytic paramagnetic spectrum on orders -m_max .. m_max."""
    orders = np.arange(-m_max, m_max + 1)
    vals = np.array([hp_intensity(int(m), omega_over_chi) for m in orders])
    return MqcSpectrum(orders, vals.astype(np.complex128), SpectrumKind.ANALYTIC)


def _harmonic(x: float) -> float:
    """Harmonic number H_x = digamma(x + 1) + Euler gamma for real x > -1."""
    return float(digamma(x + 1.0)) + float(np.euler_gamma)


def hp_intensity_near_critical(m: int, omega_over_chi: float) -> float:
    """Leading small-gap expansion of hp_intensity just above the transition.

    (2/pi) sqrt(eps) [2 H_{(m-1)/2} - 2 log 2 - log eps] with eps =
    omega/chi - 1; the -log(eps) term dominates, so the intensities vanish
    at the transition.  Asymptotic cross-check only, not exact.
    """
    g = float(omega_over_chi)
    eps = g - 1.0
    if eps <= 0.0:
        raise ValueError(f"expansion defined for omega/chi > 1, got {g}")
    h = _harmonic((abs(int(m)) - 1) / 2.0)
    return (2.0 / math.pi) * math.sqrt(eps) * (
        2.0 * h - 2.0 * math.log(2.0) - math.log(eps)
    )


def hp_second_derivative_asymptote(m: int, omega_over_chi: float) -> float:
    """Small-gap asymptote of d^2 I_m / d Omega^2 on the paramagnetic side.

    [log 4 + 2 H_{(m-1)/2} + log eps] / (2 pi eps^{3/2}); the harmonic
    number enters with positive sign, which is what the exact second
    derivative of hp_intensity approaches (finite-difference checked).
    Diverges to minus infinity as eps -> 0 since log eps dominates.
    """
    g = float(omega_over_chi)
    eps = g - 1.0
    if eps <= 0.0:
        raise ValueError(f"asymptote defined for omega/chi > 1, got {g}")
    h = _harmonic((abs(int(m)) - 1) / 2.0)
    return (math.log(4.0) + 2.0 * h + math.log(eps)) / (
        2.0 * math.pi * eps**1.5
    )


def ghz_state(n_spins: int) -> StateVector:
    """(|m=+N/2> + |m=-N/2>)/sqrt(2) in the Dicke z-basis."""
    amps = np.zeros(n_spins + 1, dtype=np.complex128)
    amps[0] = amps[-1] = 1.0 / math.sqrt(2.0)
    return StateVector(SpinBasis(BasisKind.DICKE_Z, n_spins), amps)


def ghz_intensity(n_spins: int, m: int) -> float:
    """GHZ-state intensity: binomial term plus an alternating cross term.

    (2/4^N) C(2N, N-m) + (-1)^(m/2) (2/4^N) C(N, (N-m)/2) for even m with
    |m| <= N, zero otherwise; the cross term drops when (N-m) is odd.  The
    cross-term sign convention reproduces direct rotation only for
    N = 0 mod 4; see ghz_spectrum callers for the documented discrepancy
    at other N.  Exact integer arithmetic.
    """
    n = int(n_spins)
    m = abs(int(m))
    if m % 2 == 1 or m > n:
        return 0.0
    numerator = 2 * math.comb(2 * n, n - m)
    if (n - m) % 2 == 0:
        sign = -1 if (m // 2) % 2 else 1
        numerator += sign * 2 * math.comb(n, (n - m) // 2)
    return numerator / 4**n


def ghz_spectrum(n_spins: int) -> MqcSpectrum:
    """Full analytic GHZ spectrum on orders -N .. N (sums to 1)."""
    orders = np.arange(-n_spins, n_spins + 1)
    vals = np.array([ghz_intensity(n_spins, int(m)) for m in orders])
    return MqcSpectrum(orders, vals.astype(np.complex128), SpectrumKind.ANALYTIC,
                       fotoc_at_zero=1.0)
