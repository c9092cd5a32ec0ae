"""Free-fermion solution of the transverse-field Ising chain (periodic BC).

The chain H = -chi * sum_i sz_i sz_{i+1} - omega * sum_i sx_i maps onto free
fermions; the ground state lives in the even fermion-parity sector, which uses
the half-integer quasimomentum grid k = 2*pi*(n + 1/2)/N.  All functions here
take the dimensionless field g = omega/chi.

The mode-product form of the ground-state FOTOC is the ground truth; the
closed form is algebraically equivalent and is validated against the product
(it overflows for large N, where the log-accumulated product stays finite).
"""

from __future__ import annotations

import math

import numpy as np

from .core import FotocCurve, MqcSpectrum, SpectrumKind, uniform_phi_grid

_LOG_FLUSH = -700.0  # exp underflows to 0 below this; flush explicitly
_CLOSED_FORM_IMAG_TOL = 1e-8


def half_zone_momenta(n_spins: int) -> np.ndarray:
    """Positive quasimomenta k = 2*pi*(n + 1/2)/N with 0 < k < pi.

    These are the floor(N/2) independent modes of the even-parity sector;
    the -k partners are implicit in the FOTOC product.
    """
    if n_spins < 2:
        raise ValueError("need at least 2 spins")
    n = np.arange(n_spins // 2)
    return 2.0 * np.pi * (n + 0.5) / n_spins


def dispersion(k, g: float):
    """Quasiparticle energy eps_k = 2*sqrt(g^2 - 2*g*cos k + 1) in units of chi."""
    k = np.asarray(k, dtype=np.float64)
    return 2.0 * np.sqrt(g * g - 2.0 * g * np.cos(k) + 1.0)


def bogoliubov_angle(k, g: float):
    """Bogoliubov angle theta_k with tan(theta_k) = sin k / (cos k - g).

    atan2 keeps the angle continuous in (0, pi) for k in (0, pi): theta -> k
    as g -> 0 and theta -> pi as g -> infinity.
    """
    k = np.asarray(k, dtype=np.float64)
    return np.arctan2(np.sin(k), np.cos(k) - g)


def _mode_weight(k: np.ndarray, g: float) -> np.ndarray:
    """f(k, g) = sin^2 k / (g^2 - 2 g cos k + 1), the FOTOC contrast per mode."""
    return np.sin(k) ** 2 / (g * g - 2.0 * g * np.cos(k) + 1.0)


def fotoc_product(n_spins: int, g: float, phis) -> np.ndarray:
    """Ground-state FOTOC from the mode product prod_k [1 - sin^2(phi) f(k, g)].

    Accumulates logarithms for stability at large N and flushes to zero once
    the log-sum drops below the exp underflow threshold.
    """
    phis = np.atleast_1d(np.asarray(phis, dtype=np.float64))
    k = half_zone_momenta(n_spins)
    f = _mode_weight(k, g)
    s2 = np.sin(phis) ** 2
    out = np.empty_like(phis)
    # chunk the (phi, k) outer product to bound memory at large N
    chunk = max(1, int(2**22 // max(1, k.size)))
    for lo in range(0, phis.size, chunk):
        block = s2[lo:lo + chunk, None] * f[None, :]
        factors = 1.0 - block
        with np.errstate(divide="ignore", invalid="ignore"):
            logs = np.where(factors > 0.0, np.log(np.maximum(factors, 1e-320)), -np.inf)
        total = logs.sum(axis=1)
        vals = np.where(total > _LOG_FLUSH, np.exp(total), 0.0)
        vals[np.any(factors <= 0.0, axis=1)] = 0.0
        out[lo:lo + chunk] = vals
    return out


def fotoc_closed_form(n_spins: int, g: float, phis) -> np.ndarray:
    """Closed-form ground-state FOTOC, equivalent to fotoc_product.

    Uses complex branch arithmetic for the nested square roots; raises if the
    imaginary residue of the result exceeds 1e-8 (signalling a branch problem
    or overflow, e.g. at large N where the compensating factors leave the
    double range).
    """
    phis = np.atleast_1d(np.asarray(phis, dtype=np.float64))
    n = n_spins
    out = np.empty(phis.shape, dtype=np.float64)
    s = np.abs(np.sin(phis))
    small = s < 1e-14
    out[small] = 1.0  # no rotation contrast: every product factor is 1
    if np.all(small):
        return out

    ph = phis[~small]
    gf = np.float64(g)  # numpy scalar: overflow gives inf, not OverflowError
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        s2 = np.sin(ph).astype(np.complex128) ** 2
        root = np.sqrt(1.0 - s2 * (1.0 + 1.0 / gf**2) + s2 * s2 / gf**2)
        x_plus = 0.5 * (1.0 - (gf / s2) * (1.0 - root))
        x_minus = 0.5 * (1.0 - (gf / s2) * (1.0 + root))
        z_plus = np.arcsin(np.sqrt(x_plus))
        z_minus = np.arcsin(np.sqrt(x_minus))
        cc = np.cos(n * z_plus) * np.cos(n * z_minus)
        if n % 2 == 0:
            vals = 4.0 / (1.0 + gf**n) * (np.abs(np.sin(ph)) / 2.0) ** n * cc
        else:
            # odd N has (N-1)/2 paired modes plus an unpaired k=pi mode, which
            # changes the assembled prefactor relative to the even-N formula
            vals = (
                (1.0 + gf) / (1.0 + gf**n)
                * (np.abs(np.sin(ph)) / 2.0) ** (n - 1)
                * cc / (np.cos(z_plus) * np.cos(z_minus))
            )
    bad = ~np.isfinite(vals.real) | (np.abs(vals.imag) > _CLOSED_FORM_IMAG_TOL)
    if np.any(bad):
        worst = np.max(np.abs(vals.imag[np.isfinite(vals.imag)])) if np.any(
            np.isfinite(vals.imag)) else np.inf
        raise ValueError(
            f"closed-form FOTOC lost accuracy (imag residue {worst:.3e}, "
            f"N={n}, g={g}); use fotoc_product instead"
        )
    out[~small] = vals.real
    return out


def decay_rate_continuum(g: float, phis) -> np.ndarray:
    """Continuum decay rate lambda_phi(g) with F ~ exp(-N*lambda_phi).

    Defined away from the critical point: the branch constant is 1/4 in the
    ferromagnet (g < 1) and 1/(4 g^2) in the paramagnet (g > 1).
    """
    if g == 1.0:
        raise ValueError("continuum decay rate is undefined at g = 1")
    a1 = 0.25 if g < 1.0 else 0.25 / (g * g)
    s2 = np.sin(np.asarray(phis, dtype=np.float64)) ** 2
    arg = np.maximum(1.0 - 4.0 * s2 * a1, 0.0)
    return -np.log((1.0 + np.sqrt(arg)) / 2.0)


def fotoc_continuum(n_spins: int, g: float, phis) -> np.ndarray:
    """Large-N continuum FOTOC exp(-N*lambda_phi); reduces to
    ((1+|cos phi|)/2)^N in the ferromagnet."""
    lam = decay_rate_continuum(g, phis)
    out = np.where(n_spins * lam < -_LOG_FLUSH, np.exp(-n_spins * lam), 0.0)
    return np.atleast_1d(out)


def mqc_critical(n_spins: int, m: int) -> float:
    """Critical-point (g=1) ground-state intensity I_m = 2*C(2N, N-m)/4^N.

    Exact integer arithmetic; zero for odd m and for |m| > N.
    """
    n = n_spins
    if m % 2 != 0 or abs(m) > n:
        return 0.0
    return float(2 * math.comb(2 * n, n - m) / 4**n)


def critical_spectrum(n_spins: int) -> MqcSpectrum:
    """Full critical-point spectrum on orders -N..N."""
    orders = np.arange(-n_spins, n_spins + 1)
    vals = np.array([mqc_critical(n_spins, int(m)) for m in orders])
    return MqcSpectrum(orders, vals, SpectrumKind.ANALYTIC, fotoc_at_zero=1.0)


def mqc_ferromagnetic_largeN(n_spins: int, m: int) -> float:
    """Deep-ferromagnet large-N envelope I_m ~ (2/sqrt(pi N)) exp(-m^2/N)."""
    n = n_spins
    return 2.0 / math.sqrt(math.pi * n) * math.exp(-m * m / n)


def fotoc_curve(n_spins: int, g: float, phis=None, form: str = "product") -> FotocCurve:
    """FOTOC curve on a phi grid (default 2N+2 uniform points on [0, 2*pi))."""
    if phis is None:
        phis = uniform_phi_grid(2 * n_spins + 2)
    if form == "product":
        vals = fotoc_product(n_spins, g, phis)
    elif form == "closed":
        vals = fotoc_closed_form(n_spins, g, phis)
    elif form == "continuum":
        vals = fotoc_continuum(n_spins, g, phis)
    else:
        raise ValueError(f"unknown FOTOC form {form!r}")
    kind = SpectrumKind.ANALYTIC if form != "continuum" else None
    return FotocCurve(np.atleast_1d(np.asarray(phis, float)), vals, kind)


def mqc_from_fotoc_analytic(n_spins: int, g: float, m_max: int | None = None,
                            n_phi: int | None = None) -> MqcSpectrum:
    """Ground-state MQC spectrum from the sampled analytic FOTOC.

    Samples the mode-product FOTOC on n_phi (default 2N+2) uniform angles and
    Fourier-transforms with I_m = (1/K) sum_j F(phi_j) exp(+i m phi_j).
    """
    if m_max is None:
        m_max = n_spins
    k = n_phi if n_phi is not None else 2 * n_spins + 2
    if k < 2 * m_max + 1:
        raise ValueError(
            f"{k} phi samples alias orders up to {m_max}; need at least {2 * m_max + 1}"
        )
    phis = uniform_phi_grid(k)
    vals = fotoc_product(n_spins, g, phis)
    coeff = np.fft.ifft(vals)
    orders = np.arange(-m_max, m_max + 1)
    intensities = coeff[np.mod(orders, k)]
    return MqcSpectrum(orders, intensities, SpectrumKind.ANALYTIC,
                       fotoc_at_zero=float(vals[0]))
