"""Quasi-adiabatic ramps and the echo protocols built on them.

A ramp lowers the transverse field Omega(t) from a strongly polarized start
to a target value over duration tau, discretized into midpoint steps: step j
applies exp(-i H(Omega(t_j)) dt) with t_j = (j - 1/2) dt.  The local
adiabatic schedule spends time where the instantaneous gap is small,
t(Omega) proportional to the integral of 1/gap^2.

Two retrace protocols probe the prepared state.  The ideal echo runs the
step sequence backwards with the Hamiltonian sign flipped, which undoes the
forward evolution exactly; Fourier transforming the echo signal over the
rotation angle gives the true coherence spectrum of the prepared state.
The pseudo echo retraces the schedule without flipping the sign (all a
drive-limited experiment can do); because every step generator is real
symmetric, the retraced leg applies the transpose of the forward one, and
the resulting spectrum tilde-I_m lower-bounds the true quadratic moment.

Collective-model legs use cached per-step eigendecompositions, which keeps
round-trip identities at the 1e-10 level over thousands of steps.  Lattice
legs use an adaptive short-iterate Lanczos exponential.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.interpolate import PchipInterpolator
from scipy.linalg import eigh_tridiagonal

from . import lattice, lmg, tfi
from .analysis import intensities_from_fotoc
from .core import (
    BasisMismatchError,
    ConvergenceError,
    FotocCurve,
    ModelKind,
    ModelSpec,
    MqcSpectrum,
    SpectrumKind,
    StateVector,
    uniform_phi_grid,
)

_SCHEDULE_TABLE_POINTS = 400
_KRYLOV_DIM = 20
_KRYLOV_LOCAL_TOL = 1e-10
_KRYLOV_BREAKDOWN = 1e-14
_MAX_SUBSTEP_DOUBLINGS = 24
_EIGENSTEP_MAX_DIM = 2048
_EIGENSTEP_MAX_BYTES = 1_500_000_000
_RENORM_EVERY = 512


def default_step_count(tau: float, chi: float = 1.0) -> int:
    """Step count max(1000, ceil(40 chi tau)): at least 25 steps per 1/chi."""
    return max(1000, int(math.ceil(40.0 * chi * tau)))


@dataclass(frozen=True)
class RampSchedule:
    """Midpoint-discretized field profile Omega(t) on [0, tau].

    times holds the step midpoints (j - 1/2) dt and omegas the field there;
    omega_start and omega_end are the exact requested endpoint values, which
    the midpoint samples approach but never hit.
    """

    omega_start: float
    omega_end: float
    tau: float
    steps: int
    times: np.ndarray
    omegas: np.ndarray

    def __post_init__(self):
        if self.tau <= 0.0:
            raise ValueError("ramp duration tau must be positive")
        if self.steps < 1:
            raise ValueError("need at least one step")
        times = np.ascontiguousarray(self.times, dtype=np.float64)
        omegas = np.ascontiguousarray(self.omegas, dtype=np.float64)
        if times.shape != (self.steps,) or omegas.shape != (self.steps,):
            raise ValueError("times and omegas must both have length steps")
        dt = self.tau / self.steps
        expected = (np.arange(self.steps) + 0.5) * dt
        if np.max(np.abs(times - expected)) > 1e-9 * max(self.tau, 1.0):
            raise ValueError("times must be the midpoint grid (j - 1/2) dt")
        d = np.diff(omegas)
        if self.omega_start > self.omega_end:
            ok = np.all(d < 0.0) and omegas[0] < self.omega_start \
                and omegas[-1] > self.omega_end
        elif self.omega_start < self.omega_end:
            ok = np.all(d > 0.0) and omegas[0] > self.omega_start \
                and omegas[-1] < self.omega_end
        else:
            ok = np.all(omegas == self.omega_start)
        if not ok:
            raise ValueError(
                "omegas must run strictly monotonically between the endpoints"
            )
        times.flags.writeable = False
        omegas.flags.writeable = False
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "omegas", omegas)

    @property
    def dt(self) -> float:
        return self.tau / self.steps


def linear_schedule(
    omega0: float,
    omega_tau: float,
    tau: float,
    steps: int | None = None,
    chi: float = 1.0,
) -> RampSchedule:
    """Constant-rate ramp from omega0 to omega_tau."""
    if steps is None:
        steps = default_step_count(tau, chi)
    dt = tau / steps
    times = (np.arange(steps) + 0.5) * dt
    omegas = omega0 + (omega_tau - omega0) * times / tau
    return RampSchedule(omega0, omega_tau, tau, steps, times, omegas)


def build_laa_schedule(
    omega0: float,
    omega_tau: float,
    tau: float,
    gap: Callable[[float], float],
    steps: int | None = None,
    chi: float = 1.0,
    table_points: int = _SCHEDULE_TABLE_POINTS,
) -> RampSchedule:
    """Local adiabatic schedule: dt/dOmega proportional to 1/gap(Omega)^2.

    The map t(Omega) is tabulated on table_points log-spaced field values,
    normalized so the total duration is exactly tau, then inverted with a
    monotone cubic interpolant and sampled on the midpoint grid.  Endpoints
    are pinned to the requested values.  Both field values must be positive
    (the tabulation is logarithmic) and the gap must stay positive.
    """
    if omega0 <= 0.0 or omega_tau <= 0.0:
        raise ValueError("log-spaced tabulation needs positive field endpoints")
    if omega0 == omega_tau:
        raise ValueError("ramp endpoints must differ")
    if steps is None:
        steps = default_step_count(tau, chi)
    xs = np.geomspace(omega0, omega_tau, table_points)
    gaps = np.array([float(gap(float(x))) for x in xs])
    if np.any(gaps <= 0.0) or not np.all(np.isfinite(gaps)):
        raise ValueError("gap must stay finite and positive across the ramp")
    integrand = 1.0 / gaps**2
    seg = cumulative_trapezoid(integrand, xs, initial=0.0)
    t_raw = np.abs(seg)  # descending xs integrate to negative values
    total = t_raw[-1]
    if total <= 0.0:
        raise ValueError("schedule integral vanished")
    t_tab = t_raw * (tau / total)
    t_tab[-1] = tau
    if np.any(np.diff(t_tab) <= 0.0):
        raise ValueError("schedule inversion is not monotone")
    invert = PchipInterpolator(t_tab, xs)
    dt = tau / steps
    times = (np.arange(steps) + 0.5) * dt
    omegas = np.asarray(invert(times), dtype=np.float64)
    return RampSchedule(omega0, omega_tau, tau, steps, times, omegas)


def instantaneous_gap(spec: ModelSpec, tol: float = 1e-10) -> float:
    """Energy gap above the ground state at the current parameters.

    Collective model: exact within the symmetric-parity sector from the
    folded tridiagonal.  Clean nearest-neighbour chain: analytic, twice the
    cheapest quasiparticle energy at momentum pi/N.  Other lattice models:
    two lowest Lanczos eigenvalues.
    """
    if spec.model is ModelKind.LMG:
        energies = lmg.lmg_even_sector_energies(
            spec.n_spins, spec.omega, spec.chi, count=2
        )
        return float(energies[1] - energies[0])
    plain_chain = spec.gamma == 0.0 and spec.disorder_fields is None \
        and spec.disorder_sigma == 0.0
    if plain_chain:
        k_min = math.pi / spec.n_spins
        return float(2.0 * spec.chi * tfi.dispersion(k_min, spec.g))
    h = lattice.SparseSpinHamiltonian(spec)
    energies, _ = lattice.lanczos_lowest(h, count=2, tol=tol, parity=None)
    return float(energies[1] - energies[0])


def _real_orthogonal_apply(mat: np.ndarray, vec: np.ndarray) -> np.ndarray:
    """mat @ vec for real mat and complex vec without casting the matrix."""
    return mat @ vec.real + 1j * (mat @ vec.imag)


def _krylov_step(apply_h, v, dt, sign, dim_krylov):
    """One Lanczos-exponential step exp(-i sign H dt) v with an error estimate."""
    vecs = [v]
    alphas: list[float] = []
    betas: list[float] = []
    beta_next = 0.0
    happy = False
    for j in range(dim_krylov):
        w = apply_h(vecs[-1])
        alpha = float(np.vdot(vecs[-1], w).real)
        alphas.append(alpha)
        w = w - alpha * vecs[-1]
        if j > 0:
            w = w - betas[-1] * vecs[-2]
        for u in vecs:
            w = w - np.vdot(u, w) * u
        beta = float(np.linalg.norm(w))
        if beta < _KRYLOV_BREAKDOWN:
            happy = True
            break
        if j == dim_krylov - 1:
            beta_next = beta
            break
        betas.append(beta)
        vecs.append(w / beta)
    lam, q = eigh_tridiagonal(np.asarray(alphas), np.asarray(betas))
    y = q @ (np.exp(-1j * sign * dt * lam) * q[0])
    out = np.stack(vecs, axis=1) @ y
    err = 0.0 if happy else beta_next * abs(y[-1])
    return out, err


def _krylov_expm(apply_h, v, dt, sign, dim_krylov, tol):
    """exp(-i sign H dt) v, subdividing the step until the estimate fits tol."""
    substeps = 1
    for _ in range(_MAX_SUBSTEP_DOUBLINGS):
        w = v
        budget = tol / substeps
        ok = True
        for _ in range(substeps):
            w, err = _krylov_step(apply_h, w, dt / substeps, sign, dim_krylov)
            if err > budget:
                ok = False
                break
        if ok:
            return w
        substeps *= 2
    raise ConvergenceError(
        f"short-iterate exponential failed to reach {tol} even with "
        f"{substeps} subdivisions of dt={dt}"
    )


def propagate_step(
    state: StateVector,
    h,
    dt: float,
    sign: int = 1,
    krylov_dim: int = _KRYLOV_DIM,
    local_tol: float = _KRYLOV_LOCAL_TOL,
) -> StateVector:
    """exp(-i sign H dt)|state> for any Hamiltonian exposing apply and basis."""
    if state.basis != h.basis:
        raise BasisMismatchError("state and Hamiltonian bases differ")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    amps = _krylov_expm(
        h.apply, state.amplitudes.astype(np.complex128), dt, sign,
        min(krylov_dim, state.dimension), local_tol,
    )
    return StateVector(state.basis, amps)


class RampEngine:
    """Per-step propagators for one model and schedule, reusable across legs.

    Collective specs below the memory guard store full eigendecompositions
    of every step Hamiltonian, so each step is two small matrix products and
    the retraced leg is the elementwise transpose of the forward one.
    Lattice specs share the diagonal couplings across steps and exponentiate
    with the adaptive Lanczos kernel.
    """

    def __init__(
        self,
        spec: ModelSpec,
        schedule: RampSchedule,
        krylov_dim: int = _KRYLOV_DIM,
        local_tol: float = _KRYLOV_LOCAL_TOL,
    ):
        self.spec = spec
        self.schedule = schedule
        self.krylov_dim = krylov_dim
        self.local_tol = local_tol
        self.basis = spec.basis
        dim = self.basis.dimension
        self._space = lmg.DickeSpace(spec.n_spins) \
            if spec.model is ModelKind.LMG else None
        eigen_bytes = schedule.steps * dim * (dim + 1) * 8
        if (spec.model is ModelKind.LMG and dim <= _EIGENSTEP_MAX_DIM
                and eigen_bytes <= _EIGENSTEP_MAX_BYTES):
            self.mode = "eigen"
            self._steps = []
            for om in schedule.omegas:
                h = lmg.build_lmg(spec.with_omega(float(om)))
                lam, vv = eigh_tridiagonal(h.diagonal, h.off_diagonal)
                self._steps.append((lam, vv))
        elif spec.model is ModelKind.LMG:
            self.mode = "krylov"
            self._hams = [lmg.build_lmg(spec.with_omega(float(om)))
                          for om in schedule.omegas]
        else:
            self.mode = "krylov"
            base = lattice.SparseSpinHamiltonian(spec.with_omega(
                float(schedule.omegas[0])))
            self._hams = [base.with_omega(float(om)) for om in schedule.omegas]

    def _edge_state(self, omega: float) -> StateVector:
        # ramps conserve reflection parity, so the physically connected edge
        # state is the symmetric-sector ground state even where the full
        # spectrum is quasi-degenerate
        s = self.spec.with_omega(omega)
        if s.model is ModelKind.LMG:
            return lmg.lmg_even_ground_state(s.n_spins, s.omega, s.chi)
        _, state = lattice.lanczos_ground_state(lattice.SparseSpinHamiltonian(s))
        return state

    def initial_state(self) -> StateVector:
        """Ground state at the starting field."""
        return self._edge_state(self.schedule.omega_start)

    def target_state(self) -> StateVector:
        """Ground state at the final field."""
        return self._edge_state(self.schedule.omega_end)

    def leg(self, amplitudes: np.ndarray, sign: int = 1,
            reverse: bool = False) -> np.ndarray:
        """Apply every step propagator in order (or reversed) to raw amplitudes."""
        amps = np.asarray(amplitudes, dtype=np.complex128)
        dt = self.schedule.dt
        order = range(self.schedule.steps - 1, -1, -1) if reverse \
            else range(self.schedule.steps)
        if self.mode == "eigen":
            for count, j in enumerate(order, start=1):
                lam, vv = self._steps[j]
                c = _real_orthogonal_apply(vv.T, amps)
                c *= np.exp(-1j * sign * dt * lam)
                amps = _real_orthogonal_apply(vv, c)
                if count % _RENORM_EVERY == 0:
                    amps = amps / np.linalg.norm(amps)
        else:
            for count, j in enumerate(order, start=1):
                amps = _krylov_expm(self._hams[j].apply, amps, dt, sign,
                                    min(self.krylov_dim, amps.size),
                                    self.local_tol)
                if count % _RENORM_EVERY == 0:
                    amps = amps / np.linalg.norm(amps)
        return amps

    def rotate(self, state: StateVector, phi: float) -> StateVector:
        """exp(-i phi S_x)|state> in whichever basis the engine runs."""
        if self._space is not None:
            return self._space.rotate(state, phi)
        return lattice.apply_global_x_rotation(state, phi)

    def mqc_spectrum(self, state: StateVector,
                     m_max: int | None = None) -> MqcSpectrum:
        """True coherence spectrum of a state, from x-basis weights."""
        if self._space is not None:
            return self._space.mqc_spectrum(state, m_max)
        return lattice.mqc_spectrum_of_state(state, m_max)


def run_ramp(
    v0: StateVector,
    spec: ModelSpec,
    schedule: RampSchedule,
    sign: int = 1,
    reverse: bool = False,
    engine: RampEngine | None = None,
    krylov_dim: int = _KRYLOV_DIM,
    local_tol: float = _KRYLOV_LOCAL_TOL,
) -> StateVector:
    """Propagate v0 through the discretized ramp."""
    if engine is None:
        engine = RampEngine(spec, schedule, krylov_dim, local_tol)
    if v0.basis != engine.basis:
        raise BasisMismatchError("initial state basis does not match the model")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    amps = engine.leg(v0.amplitudes, sign=sign, reverse=reverse)
    return StateVector(engine.basis, amps)


class EchoKind(Enum):
    IDEAL = "ideal"
    PSEUDO = "pseudo"


@dataclass(frozen=True)
class EchoResult:
    """Echo overlap at one rotation angle.

    overlap is the probability of returning to the initial state after
    forward leg, rotation, and retraced leg; return_fidelity is the same
    protocol at phi = 0.
    """

    phi: float
    overlap: float
    kind: EchoKind
    return_fidelity: float


@dataclass(frozen=True)
class EchoScan:
    """Echo signal over a full rotation-angle grid and its Fourier transform.

    ground_fidelity is the unsquared fidelity |<gs|psi(tau)>| of the ramped
    state to the instantaneous ground state at the final field, while
    return_fidelity is the measured echo signal at phi = 0 (a probability).
    """

    kind: EchoKind
    phis: np.ndarray
    signals: np.ndarray
    spectrum: MqcSpectrum
    return_fidelity: float
    ground_fidelity: float
    forward_state: StateVector


def _echo_signal(engine: RampEngine, v0_amps: np.ndarray,
                 forward: StateVector, phi: float, backward_sign: int) -> float:
    rotated = engine.rotate(forward, phi)
    back = engine.leg(rotated.amplitudes, sign=backward_sign, reverse=True)
    return float(abs(np.vdot(v0_amps, back)) ** 2)


def run_ideal_echo(
    spec: ModelSpec,
    schedule: RampSchedule,
    phi: float,
    engine: RampEngine | None = None,
    krylov_dim: int = _KRYLOV_DIM,
    local_tol: float = _KRYLOV_LOCAL_TOL,
) -> EchoResult:
    """Forward ramp, collective rotation, sign-flipped retraced ramp."""
    if engine is None:
        engine = RampEngine(spec, schedule, krylov_dim, local_tol)
    v0 = engine.initial_state()
    forward = StateVector(engine.basis, engine.leg(v0.amplitudes))
    overlap = _echo_signal(engine, v0.amplitudes, forward, phi, backward_sign=-1)
    zero = _echo_signal(engine, v0.amplitudes, forward, 0.0, backward_sign=-1)
    return EchoResult(float(phi), overlap, EchoKind.IDEAL, zero)


def run_pseudo_echo(
    spec: ModelSpec,
    schedule: RampSchedule,
    phi: float,
    engine: RampEngine | None = None,
    krylov_dim: int = _KRYLOV_DIM,
    local_tol: float = _KRYLOV_LOCAL_TOL,
) -> EchoResult:
    """Forward ramp, collective rotation, retraced ramp without sign flip."""
    if engine is None:
        engine = RampEngine(spec, schedule, krylov_dim, local_tol)
    v0 = engine.initial_state()
    forward = StateVector(engine.basis, engine.leg(v0.amplitudes))
    overlap = _echo_signal(engine, v0.amplitudes, forward, phi, backward_sign=1)
    zero = _echo_signal(engine, v0.amplitudes, forward, 0.0, backward_sign=1)
    return EchoResult(float(phi), overlap, EchoKind.PSEUDO, zero)


def echo_spectrum_scan(
    spec: ModelSpec,
    schedule: RampSchedule,
    kind: EchoKind = EchoKind.IDEAL,
    n_phi: int | None = None,
    m_max: int | None = None,
    engine: RampEngine | None = None,
    krylov_dim: int = _KRYLOV_DIM,
    local_tol: float = _KRYLOV_LOCAL_TOL,
) -> EchoScan:
    """Echo signal on a uniform phi grid, Fourier-transformed to intensities.

    The forward leg runs once and is shared across the grid; each angle then
    costs one retraced leg.  n_phi defaults to 2N + 2, which resolves every
    order of an N-spin state without aliasing.
    """
    if engine is None:
        engine = RampEngine(spec, schedule, krylov_dim, local_tol)
    n = spec.n_spins
    if n_phi is None:
        n_phi = 2 * n + 2
    if m_max is None:
        m_max = n
    phis = uniform_phi_grid(n_phi)
    v0 = engine.initial_state()
    forward = StateVector(engine.basis, engine.leg(v0.amplitudes))
    target = engine.target_state()
    ground_fid = float(abs(np.vdot(target.amplitudes, forward.amplitudes)))
    backward_sign = -1 if kind is EchoKind.IDEAL else 1
    signals = np.empty(n_phi)
    for i, phi in enumerate(phis):
        signals[i] = _echo_signal(engine, v0.amplitudes, forward,
                                  float(phi), backward_sign)
    spectrum_kind = SpectrumKind.TRUE_ECHO if kind is EchoKind.IDEAL \
        else SpectrumKind.PSEUDO_ECHO
    curve = FotocCurve(phis, signals, kind=spectrum_kind)
    fotoc0 = float(signals[0]) if m_max >= n else None
    spectrum = intensities_from_fotoc(curve, m_max=m_max, kind=spectrum_kind,
                                      fotoc_at_zero=fotoc0)
    return EchoScan(kind, phis, signals, spectrum, float(signals[0]),
                    ground_fid, forward)


@dataclass(frozen=True)
class CurvatureCheck:
    """Quadratic-moment comparison between a true and a pseudo spectrum."""

    true_moment: float
    pseudo_moment: float
    bound_holds: bool
    qfi_lower_bound: float


def curvature_bound_check(true_spectrum: MqcSpectrum,
                          pseudo_spectrum: MqcSpectrum) -> CurvatureCheck:
    """Verify sum m^2 |tilde-I_m| <= sum m^2 I_m within rounding slack.

    The pseudo-echo moment can only underestimate the true one, so twice the
    pseudo moment is a measurable lower bound on the quantum Fisher
    information of the prepared state.
    """
    t_orders = true_spectrum.orders.astype(np.float64)
    p_orders = pseudo_spectrum.orders.astype(np.float64)
    lhs = float(t_orders**2 @ np.abs(true_spectrum.intensities))
    rhs = float(p_orders**2 @ np.abs(pseudo_spectrum.intensities))
    slack = 1e-12 * max(1.0, lhs)
    return CurvatureCheck(lhs, rhs, rhs <= lhs + slack, 2.0 * rhs)


def ground_state_for(spec: ModelSpec) -> StateVector:
    """Ground state of any supported model at its stated parameters.

    For reflection-symmetric models the symmetric-branch representative is
    returned, which stays well defined across the quasi-degenerate
    ferromagnetic regime.
    """
    if spec.model is ModelKind.LMG:
        return lmg.lmg_even_ground_state(spec.n_spins, spec.omega, spec.chi)
    _, state = lattice.lanczos_ground_state(lattice.SparseSpinHamiltonian(spec))
    return state


def ramp_ground_fidelity(
    spec: ModelSpec,
    schedule: RampSchedule,
    engine: RampEngine | None = None,
    krylov_dim: int = _KRYLOV_DIM,
    local_tol: float = _KRYLOV_LOCAL_TOL,
) -> float:
    """Fidelity |<gs|psi(tau)>| of the ramped state to the final ground state.

    Runs the forward leg only.  The value is the unsquared overlap modulus;
    square it for the occupation probability of the target state.
    """
    if engine is None:
        engine = RampEngine(spec, schedule, krylov_dim, local_tol)
    v0 = engine.initial_state()
    forward = engine.leg(v0.amplitudes)
    target = engine.target_state()
    return float(abs(np.vdot(target.amplitudes, forward)))


def ground_mqc_spectrum(spec: ModelSpec, m_max: int | None = None) -> MqcSpectrum:
    """True coherence spectrum of the ground state at the stated parameters."""
    state = ground_state_for(spec)
    if spec.model is ModelKind.LMG:
        return lmg.DickeSpace(spec.n_spins).mqc_spectrum(state, m_max)
    return lattice.mqc_spectrum_of_state(state, m_max)
