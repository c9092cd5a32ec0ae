"""Transition signatures from ground-state coherence intensities.

The second derivative of I_m with respect to the transverse field develops a
peak at the finite-size precursor of the quantum critical point.  This module
packages the intensity-versus-field functions for each model family (cached
and warm-started so field scans stay cheap), a peak driver that combines a
coarse scan with window refinement, and size-scaling fits of the resulting
peak locations and heights.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import lattice, lmg, tfi
from .analysis import (
    DerivativeScan,
    PeakEstimate,
    PeakSide,
    ScalingFit,
    fit_power_law,
    locate_peak,
    refine_peak,
    second_derivative_scan,
)
from .core import ModelKind, ModelSpec

_SCAN_KEY_DECIMALS = 12
_LANCZOS_SCAN_TOL = 1e-12
_DEFAULT_FD_STEP = 1e-4


def _key(omega: float) -> float:
    return round(float(omega), _SCAN_KEY_DECIMALS)


class CollectiveIntensityScan:
    """I_0 and I_2 of the collective-model ground state versus field.

    States come from the reflection-even folded solve, so the scan stays on
    the symmetric branch through the quasi-degenerate regime.  One ground
    state is solved per distinct field value and shared between orders.
    """

    def __init__(self, n_spins: int, chi: float = 1.0):
        self.n_spins = n_spins
        self.chi = chi
        self._space = lmg.DickeSpace(n_spins)
        self._weights: dict[float, np.ndarray] = {}

    def _w(self, omega: float) -> np.ndarray:
        k = _key(omega)
        if k not in self._weights:
            state = lmg.lmg_even_ground_state(self.n_spins, float(omega), self.chi)
            self._weights[k] = self._space.x_weights(state)
        return self._weights[k]

    def i0(self, omega: float) -> float:
        w = self._w(omega)
        return float(w @ w)

    def i2(self, omega: float) -> float:
        w = self._w(omega)
        return float(w[:-2] @ w[2:])


class FreeFermionIntensityScan:
    """I_0 and I_2 of the clean-chain ground state from the mode product.

    The FOTOC is evaluated on a phase grid wide enough that intensity
    aliasing is negligible at the requested size (the spectrum width grows
    like sqrt(N)), then averaged against the Fourier kernels.
    """

    def __init__(self, n_spins: int, chi: float = 1.0, n_phi: int | None = None):
        self.n_spins = n_spins
        self.chi = chi
        if n_phi is None:
            n_phi = 256
            while n_phi < 10.0 * np.sqrt(n_spins):
                n_phi *= 2
        self._phis = 2.0 * np.pi * np.arange(n_phi) / n_phi
        self._cos2 = np.cos(2.0 * self._phis)
        self._curves: dict[float, np.ndarray] = {}

    def _curve(self, omega: float) -> np.ndarray:
        k = _key(omega)
        if k not in self._curves:
            g = float(omega) / self.chi
            self._curves[k] = tfi.fotoc_product(self.n_spins, g, self._phis)
        return self._curves[k]

    def i0(self, omega: float) -> float:
        return float(self._curve(omega).mean())

    def i2(self, omega: float) -> float:
        return float((self._curve(omega) * self._cos2).mean())


class GroundIntensityScan:
    """I_0 of a lattice-model ground state, Lanczos with warm restarts.

    make_spec maps a field value to the full model description; successive
    calls reuse the previous ground state as the Lanczos start, which cuts
    the solve cost several-fold on a fine scan.  Only scalar intensities are
    cached, so memory stays at one state vector.
    """

    def __init__(
        self,
        make_spec: Callable[[float], ModelSpec],
        tol: float = _LANCZOS_SCAN_TOL,
        max_iter: int = 300,
    ):
        self._make_spec = make_spec
        self._tol = tol
        self._max_iter = max_iter
        self._warm = None
        self._cache: dict[float, float] = {}

    def i0(self, omega: float) -> float:
        k = _key(omega)
        if k not in self._cache:
            spec = self._make_spec(float(omega))
            h = lattice.SparseSpinHamiltonian(spec)
            _, gs = lattice.lanczos_ground_state(
                h, tol=self._tol, max_iter=self._max_iter, start=self._warm
            )
            self._warm = gs
            _, w = lattice.x_basis_weights(gs)
            self._cache[k] = float(w @ w)
        return self._cache[k]


def clean_chain_scan(n_spins: int, chi: float = 1.0,
                     tol: float = _LANCZOS_SCAN_TOL) -> GroundIntensityScan:
    """Lanczos I_0 scan of the clean nearest-neighbour chain."""
    return GroundIntensityScan(
        lambda om: ModelSpec(ModelKind.TFI, n_spins, omega=om, chi=chi), tol=tol
    )


def annni_scan(n_spins: int, gamma: float, chi: float = 1.0,
               tol: float = _LANCZOS_SCAN_TOL) -> GroundIntensityScan:
    """Lanczos I_0 scan of the chain with next-nearest-neighbour coupling."""
    return GroundIntensityScan(
        lambda om: ModelSpec(ModelKind.ANNNI, n_spins, omega=om, chi=chi,
                             gamma=gamma),
        tol=tol,
    )


def transition_peak(
    fn: Callable[[float], float],
    lo: float,
    hi: float,
    coarse_points: int | None = None,
    fd_step: float = _DEFAULT_FD_STEP,
    side: PeakSide = PeakSide.POSITIVE,
    refine_points: int = 9,
    refine_rounds: int = 2,
) -> PeakEstimate:
    """Refined peak of d^2 fn / d omega^2 inside [lo, hi].

    With coarse_points the window is first narrowed by a uniform scan (one
    coarse cell on either side of the located maximum); otherwise [lo, hi]
    is refined directly.  The returned height keeps the sign of the data.
    """
    h = float(fd_step)
    flip = -1.0 if side is PeakSide.NEGATIVE else 1.0

    def d2(x: float) -> float:
        return flip * (fn(x + h) - 2.0 * fn(x) + fn(x - h)) / (h * h)

    if coarse_points is not None:
        scan = second_derivative_scan(fn, np.linspace(lo, hi, coarse_points),
                                      fd_step=h)
        est = locate_peak(scan, side=side)
        cell = (hi - lo) / (coarse_points - 1)
        lo, hi = est.position - cell, est.position + cell
    est = refine_peak(d2, lo, hi, points=refine_points, rounds=refine_rounds)
    return PeakEstimate(est.position, flip * est.height, est.index)


@dataclass(frozen=True)
class PeakScalingResult:
    """Transition-peak locations and heights across sizes, with their fits.

    location_fit is the power law of the distance 1 - position/chi from the
    infinite-size critical point; height fits cover the I_0 and I_2 peaks.
    """

    sizes: np.ndarray
    positions: np.ndarray
    heights0: np.ndarray
    heights2: np.ndarray
    location_fit: ScalingFit
    height0_fit: ScalingFit
    height2_fit: ScalingFit


def lmg_peak_scaling(
    sizes: Sequence[int] = (200, 400, 800, 1600),
    window: tuple[float, float] = (0.85, 1.02),
    coarse_points: int = 35,
    fd_step: float = _DEFAULT_FD_STEP,
) -> PeakScalingResult:
    """Collective-model peak scaling over system size.

    Scans d^2 I_0 and d^2 I_2 below the critical field for each size; the
    finite-size peak approaches omega = chi from below as a power of N.
    """
    positions, h0s, h2s = [], [], []
    for n in sizes:
        scan = CollectiveIntensityScan(int(n))
        p0 = transition_peak(scan.i0, window[0], window[1],
                             coarse_points=coarse_points, fd_step=fd_step,
                             refine_points=13, refine_rounds=3)
        p2 = transition_peak(scan.i2, window[0], window[1],
                             coarse_points=coarse_points, fd_step=fd_step,
                             refine_points=13, refine_rounds=3)
        positions.append(p0.position)
        h0s.append(p0.height)
        h2s.append(p2.height)
    sizes = np.asarray(sizes, dtype=np.float64)
    positions = np.asarray(positions)
    return PeakScalingResult(
        sizes, positions, np.asarray(h0s), np.asarray(h2s),
        fit_power_law(sizes, 1.0 - positions),
        fit_power_law(sizes, np.asarray(h0s)),
        fit_power_law(sizes, np.asarray(h2s)),
    )


def tfi_peak_scaling(
    sizes: Sequence[int] = (200, 500, 1000, 2000, 5000),
    fd_step: float = _DEFAULT_FD_STEP,
) -> PeakScalingResult:
    """Free-fermion peak scaling over system size.

    The finite-size peak sits a distance of order 1/N^2 below the critical
    field, so each size gets a window centered on that guess, wide enough
    to absorb the uncertainty of the prefactor.
    """
    positions, h0s, h2s = [], [], []
    for n in sizes:
        scan = FreeFermionIntensityScan(int(n))
        guess = 1.0 - 1.5 / n**2
        w = max(10.0 / n**2, 0.06 / n)
        p0 = transition_peak(scan.i0, guess - w, guess + w, fd_step=fd_step,
                             refine_points=13, refine_rounds=3)
        p2 = transition_peak(scan.i2, guess - w, guess + w, fd_step=fd_step,
                             refine_points=13, refine_rounds=3)
        positions.append(p0.position)
        h0s.append(p0.height)
        h2s.append(p2.height)
    sizes = np.asarray(sizes, dtype=np.float64)
    positions = np.asarray(positions)
    return PeakScalingResult(
        sizes, positions, np.asarray(h0s), np.asarray(h2s),
        fit_power_law(sizes, 1.0 - positions),
        fit_power_law(sizes, np.asarray(h0s)),
        fit_power_law(sizes, np.asarray(h2s)),
    )


def disorder_averaged_curve(
    n_spins: int,
    sigma: float,
    seeds: Sequence[int],
    omegas,
    fd_step: float = _DEFAULT_FD_STEP,
    chi: float = 1.0,
    tol: float = _LANCZOS_SCAN_TOL,
) -> DerivativeScan:
    """Seed-averaged I_0 and its second derivative over a field grid.

    Runs seed-major with one warm-started scan per realization, so memory
    holds a single state vector regardless of the ensemble size.  Averaging
    commutes with the finite difference, so the averaged stencil equals the
    stencil of the average.
    """
    grid = np.atleast_1d(np.asarray(omegas, dtype=np.float64))
    h = float(fd_step)
    values = np.zeros(grid.size)
    seconds = np.zeros(grid.size)
    for seed in seeds:
        fields = lattice.draw_disorder(int(seed), sigma, n_spins).fields
        scan = GroundIntensityScan(
            lambda om, f=fields: ModelSpec(
                ModelKind.RFTI, n_spins, omega=om, chi=chi,
                disorder_sigma=sigma, disorder_fields=f,
            ),
            tol=tol,
        )
        for i, x in enumerate(grid):
            fm = scan.i0(float(x - h))
            f0 = scan.i0(float(x))
            fp = scan.i0(float(x + h))
            values[i] += f0
            seconds[i] += (fp - 2.0 * f0 + fm) / (h * h)
    n_seeds = float(len(seeds))
    return DerivativeScan(grid, values / n_seeds, seconds / n_seeds, h)


def refine_disorder_peak(
    n_spins: int,
    sigma: float,
    seeds: Sequence[int],
    lo: float,
    hi: float,
    fd_step: float = _DEFAULT_FD_STEP,
    points: int = 9,
    rounds: int = 2,
    chi: float = 1.0,
    tol: float = _LANCZOS_SCAN_TOL,
) -> PeakEstimate:
    """Zoom the averaged d^2 I_0 peak by repeated gridded averaging passes."""
    est = None
    for _ in range(rounds):
        scan = disorder_averaged_curve(n_spins, sigma, seeds,
                                       np.linspace(lo, hi, points),
                                       fd_step=fd_step, chi=chi, tol=tol)
        est = locate_peak(scan, side=PeakSide.POSITIVE)
        cell = (hi - lo) / (points - 1)
        lo, hi = est.position - cell, est.position + cell
    return est
