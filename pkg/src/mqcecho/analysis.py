"""Spectrum post-processing: moments, derivatives, peaks, scaling fits.

Everything here operates on plain arrays, FotocCurve, or MqcSpectrum and is
model-agnostic.  The finite-difference and peak helpers are the workhorses
for locating phase-transition signatures in I_m(Omega) scans; the fit and
averaging helpers handle size scaling and disorder ensembles.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .core import FotocCurve, MqcSpectrum, SpectrumKind

_GRID_ATOL = 1e-12
_MIN_FIT_SIZES = 4


def intensities_from_fotoc(
    curve: FotocCurve,
    m_max: int | None = None,
    kind: SpectrumKind | None = None,
    fotoc_at_zero: float | None = None,
) -> MqcSpectrum:
    """Discrete Fourier transform of F(phi) into coherence-order intensities.

    The curve must sample a full uniform grid phi_j = 2 pi j / K, j = 0..K-1.
    I_m = (1/K) sum_j F(phi_j) exp(+i m phi_j), reported on -m_max..m_max.
    K must satisfy K >= 2 m_max + 1, otherwise orders alias and the call
    fails.  The default m_max = (K-1)//2 keeps every alias-free order.
    """
    phis = curve.phis
    k = phis.size
    expected = 2.0 * np.pi * np.arange(k) / k
    if k < 1 or np.max(np.abs(phis - expected)) > _GRID_ATOL:
        raise ValueError("curve must sample a uniform phi grid on [0, 2 pi)")
    if m_max is None:
        m_max = (k - 1) // 2
    m_max = int(m_max)
    if m_max < 0:
        raise ValueError("m_max must be nonnegative")
    if 2 * m_max + 1 > k:
        raise ValueError(
            f"{k} phase samples cannot resolve orders up to {m_max} "
            f"without aliasing; need at least {2 * m_max + 1}"
        )
    coeffs = np.fft.ifft(curve.values)
    orders = np.arange(-m_max, m_max + 1)
    intensities = coeffs[orders % k]
    if kind is None:
        kind = curve.kind if curve.kind is not None else SpectrumKind.ANALYTIC
    return MqcSpectrum(orders, intensities, kind, fotoc_at_zero=fotoc_at_zero)


def spectrum_width(spectrum: MqcSpectrum) -> float:
    """Coherence spread sigma = sqrt(sum_m m^2 |I_m|).

    For a normalized spectrum of a pure state this equals the standard
    deviation of the coherence-order distribution and satisfies
    sigma^2 = 2 Var(S_x); twice sigma^2 is the quantum Fisher information
    lower bound reported by qfi_lower_bound.
    """
    mags = np.abs(spectrum.intensities)
    return float(np.sqrt(spectrum.orders.astype(np.float64) ** 2 @ mags))


def qfi_lower_bound(spectrum: MqcSpectrum) -> float:
    """2 sum_m m^2 |I_m|, a lower bound on the quantum Fisher information."""
    mags = np.abs(spectrum.intensities)
    return float(2.0 * (spectrum.orders.astype(np.float64) ** 2 @ mags))


@dataclass(frozen=True)
class DerivativeScan:
    """A scalar observable and its second derivative over a field grid."""

    omegas: np.ndarray
    values: np.ndarray
    second_derivative: np.ndarray
    fd_step: float


def second_derivative_scan(
    fn: Callable[[float], float],
    omegas,
    fd_step: float = 1e-4,
) -> DerivativeScan:
    """Central-difference d^2 fn / d omega^2 at each grid point.

    Three evaluations per point at omega and omega +- fd_step.  The step
    trades truncation against cancellation; the default suits observables
    that are smooth on scales well above 1e-4 with values of order one.
    """
    grid = np.atleast_1d(np.asarray(omegas, dtype=np.float64))
    h = float(fd_step)
    if h <= 0.0:
        raise ValueError("fd_step must be positive")
    values = np.empty(grid.size)
    seconds = np.empty(grid.size)
    for i, x in enumerate(grid):
        f0 = float(fn(float(x)))
        fp = float(fn(float(x + h)))
        fm = float(fn(float(x - h)))
        values[i] = f0
        seconds[i] = (fp - 2.0 * f0 + fm) / (h * h)
    return DerivativeScan(grid, values, seconds, h)


@dataclass(frozen=True)
class PeakEstimate:
    """Sub-grid peak location from a three-point quadratic fit."""

    position: float
    height: float
    index: int


class PeakSide(enum.Enum):
    """Sign of the scanned feature: a positive peak or a negative dip."""

    POSITIVE = "positive"
    NEGATIVE = "negative"


def peak_from_samples(xs, ys) -> PeakEstimate:
    """Largest sample refined by the parabola through its two neighbours.

    The refinement is exact for locally quadratic data and invariant under
    affine rescaling of either axis.  A maximum on the first or last grid
    point has no bracket and raises; widen the scan window instead.
    """
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if xs.shape != ys.shape or xs.ndim != 1 or xs.size < 3:
        raise ValueError("need matching 1-d arrays with at least 3 points")
    i = int(np.argmax(ys))
    if i == 0 or i == xs.size - 1:
        raise ValueError(
            f"maximum sits on the scan boundary (index {i}); widen the window"
        )
    x0, x1, x2 = xs[i - 1], xs[i], xs[i + 1]
    y0, y1, y2 = ys[i - 1], ys[i], ys[i + 1]
    d01 = (y1 - y0) / (x1 - x0)
    d12 = (y2 - y1) / (x2 - x1)
    curv = (d12 - d01) / (x2 - x0)  # leading quadratic coefficient
    if curv >= 0.0:
        # flat top (ties) falls back to the sampled maximum
        return PeakEstimate(float(x1), float(y1), i)
    pos = 0.5 * (x0 + x1) - 0.5 * d01 / curv
    # interpolating quadratic in Newton form, evaluated at the vertex
    height = y0 + d01 * (pos - x0) + curv * (pos - x0) * (pos - x1)
    return PeakEstimate(float(pos), float(height), i)


def locate_peak(scan: DerivativeScan,
                side: PeakSide = PeakSide.POSITIVE) -> PeakEstimate:
    """Extremum of the scanned second derivative on the chosen side.

    POSITIVE finds the largest value of d^2/d omega^2, NEGATIVE the most
    negative one.  The reported height keeps the sign of the underlying
    data either way.
    """
    ys = scan.second_derivative
    if side is PeakSide.NEGATIVE:
        est = peak_from_samples(scan.omegas, -ys)
        return PeakEstimate(est.position, -est.height, est.index)
    return peak_from_samples(scan.omegas, ys)


def refine_peak(
    fn: Callable[[float], float],
    lo: float,
    hi: float,
    points: int = 11,
    rounds: int = 3,
) -> PeakEstimate:
    """Iteratively zoom a grid scan onto the maximum of fn over [lo, hi].

    Each round scans a uniform grid, locates the refined peak, and narrows
    the window to one grid cell on either side of it.  The final resolution
    is (hi-lo) * (2/(points-1))^rounds before quadratic refinement.
    """
    if points < 5:
        raise ValueError("need at least 5 points per round")
    if rounds < 1:
        raise ValueError("need at least one round")
    est = None
    for _ in range(rounds):
        xs = np.linspace(lo, hi, points)
        ys = np.array([float(fn(float(x))) for x in xs])
        est = peak_from_samples(xs, ys)
        cell = (hi - lo) / (points - 1)
        lo = est.position - cell
        hi = est.position + cell
    return est


@dataclass(frozen=True)
class ScalingFit:
    """Power-law fit values ~ amplitude * size**exponent."""

    exponent: float
    amplitude: float
    exponent_stderr: float
    sizes: np.ndarray
    values: np.ndarray

    @property
    def window(self) -> tuple[float, float]:
        """Size range the fit covers."""
        return float(self.sizes.min()), float(self.sizes.max())


def fit_power_law(sizes, values) -> ScalingFit:
    """Least-squares line through (log size, log value).

    Requires at least 4 strictly positive sizes and values; the exponent
    standard error comes from the residual variance with n - 2 degrees of
    freedom.
    """
    sizes = np.asarray(sizes, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    if sizes.shape != values.shape or sizes.ndim != 1:
        raise ValueError("sizes and values must be 1-d arrays of equal length")
    if sizes.size < _MIN_FIT_SIZES:
        raise ValueError(f"need at least {_MIN_FIT_SIZES} sizes for a scaling fit")
    if np.any(sizes <= 0.0) or np.any(values <= 0.0):
        raise ValueError("power-law fits need strictly positive sizes and values")
    x = np.log(sizes)
    y = np.log(values)
    xbar = x.mean()
    sxx = np.sum((x - xbar) ** 2)
    slope = np.sum((x - xbar) * (y - y.mean())) / sxx
    intercept = y.mean() - slope * xbar
    resid = y - (intercept + slope * x)
    if sizes.size > 2:
        var = np.sum(resid**2) / (sizes.size - 2)
        stderr = float(np.sqrt(var / sxx))
    else:
        stderr = np.nan
    return ScalingFit(float(slope), float(np.exp(intercept)), stderr, sizes, values)


@dataclass(frozen=True)
class DisorderAverage:
    """Ensemble mean and standard error of intensities over realizations."""

    orders: np.ndarray
    mean_intensities: np.ndarray
    sem: np.ndarray
    n_realizations: int
    kind: SpectrumKind

    def mean_spectrum(self) -> MqcSpectrum:
        return MqcSpectrum(self.orders, self.mean_intensities, self.kind)


def disorder_average(spectra: Sequence[MqcSpectrum]) -> DisorderAverage:
    """Average aligned spectra; SEM uses the sample std over realizations.

    All spectra must share one order grid.  A single realization has no
    spread estimate and reports SEM = 0.
    """
    if len(spectra) == 0:
        raise ValueError("no spectra to average")
    orders = spectra[0].orders
    for s in spectra[1:]:
        if not np.array_equal(s.orders, orders):
            raise ValueError("spectra live on different coherence-order grids")
    stack = np.stack([s.intensities for s in spectra])
    mean = stack.mean(axis=0)
    if len(spectra) > 1:
        sem = stack.real.std(axis=0, ddof=1) / np.sqrt(len(spectra))
    else:
        sem = np.zeros(orders.size)
    return DisorderAverage(orders, mean, sem, len(spectra), spectra[0].kind)


def prominence_ratio(ys, peak_index: int | None = None, exclude: int = 2) -> float:
    """Peak height over local background, in background standard deviations.

    Background statistics come from all samples further than `exclude`
    indices from the peak.  A ratio of a few means the peak is consistent
    with scatter; well-resolved transition signatures reach far higher.
    """
    ys = np.asarray(ys, dtype=np.float64)
    if ys.ndim != 1 or ys.size < exclude * 2 + 5:
        raise ValueError("scan too short to estimate a background")
    i = int(np.argmax(ys)) if peak_index is None else int(peak_index)
    mask = np.abs(np.arange(ys.size) - i) > exclude
    background = ys[mask]
    if background.size < 4:
        raise ValueError("background window too small")
    spread = background.std(ddof=1)
    if spread == 0.0:
        return np.inf
    return float((ys[i] - background.mean()) / spread)
