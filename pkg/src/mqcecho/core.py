"""Shared types for spin bases, states, model parameters and MQC spectra.

Conventions fixed here and used everywhere else:

* Dicke basis (collective models): dimension N+1, basis labels are the S_z
  eigenvalues m = -N/2, ..., +N/2 in ascending order.
* Bitstring basis (lattice models): dimension 2^N, site 0 is the least
  significant bit of the basis index.  Bit value 0 means sigma^z = +1.
* Coherence orders m are integers; spectra are stored on the full symmetric
  range -m_max..+m_max in ascending order.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

# Central numerical tolerances.  Tests and validators reference these rather
# than repeating literals.
NORM_ATOL = 1e-10          # state vector normalization
UNITARITY_ATOL = 1e-10     # rotation / propagation norm preservation
SPECTRUM_REAL_ATOL = 1e-9  # imaginary residue allowed in echo/analytic spectra
SPECTRUM_NONNEG_ATOL = 1e-9
SPECTRUM_SYMMETRY_ATOL = 1e-9
SPECTRUM_SUM_ATOL = 1e-8   # sum of intensities vs FOTOC at phi=0
FOTOC_RANGE_ATOL = 1e-12   # FOTOC values may stray this far outside [0, 1]
FOTOC_AT_ZERO_ATOL = 1e-10
# Simulated echo signals carry accumulated propagator error, so curves and
# spectra tagged with an echo kind are validated at a looser gate.
ECHO_VALIDATION_ATOL = 1e-6

MAX_BITSTRING_SPINS = 24   # refuse 2^N bases beyond this many spins


class BasisMismatchError(ValueError):
    """Raised when two states (or a state and an operator) live in different bases."""


class ConvergenceError(RuntimeError):
    """Raised when an iterative solver fails to reach its tolerance."""


class ResourceLimitError(RuntimeError):
    """Raised when a requested computation exceeds the configured memory budget."""


class BasisKind(enum.Enum):
    DICKE_Z = "dicke_z"
    BITSTRING = "bitstring"


@dataclass(frozen=True)
class SpinBasis:
    """Computational basis for N spin-1/2 particles."""

    kind: BasisKind
    n_spins: int

    def __post_init__(self):
        if self.n_spins < 2:
            raise ValueError(f"need at least 2 spins, got {self.n_spins}")
        if self.kind is BasisKind.BITSTRING and self.n_spins > MAX_BITSTRING_SPINS:
            raise ResourceLimitError(
                f"bitstring basis with N={self.n_spins} exceeds the cap of "
                f"{MAX_BITSTRING_SPINS} spins (2^N state would need "
                f"{16 * 2**self.n_spins} bytes)"
            )

    @property
    def dimension(self) -> int:
        if self.kind is BasisKind.DICKE_Z:
            return self.n_spins + 1
        return 2 ** self.n_spins

    def sz_labels(self) -> np.ndarray:
        """S_z eigenvalue of each basis vector, in basis order."""
        n = self.n_spins
        if self.kind is BasisKind.DICKE_Z:
            return np.arange(n + 1) - n / 2.0
        bits = np.arange(2 ** n, dtype=np.int64)
        pop = popcount(bits, n)
        return (n - 2.0 * pop) / 2.0


def popcount(indices: np.ndarray, n_bits: int) -> np.ndarray:
    """Number of set bits of each index, for indices below 2**n_bits."""
    out = np.zeros_like(indices, dtype=np.int64)
    for i in range(n_bits):
        out += (indices >> i) & 1
    return out


@dataclass(frozen=True)
class StateVector:
    """Normalized pure state over a SpinBasis.  Immutable after construction."""

    basis: SpinBasis
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.ascontiguousarray(self.amplitudes, dtype=np.complex128)
        if amps.shape != (self.basis.dimension,):
            raise ValueError(
                f"amplitude shape {amps.shape} does not match basis dimension "
                f"{self.basis.dimension}"
            )
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > NORM_ATOL:
            raise ValueError(f"state norm {norm!r} deviates from 1 beyond {NORM_ATOL}")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dimension(self) -> int:
        return self.basis.dimension


def inner_product(a: StateVector, b: StateVector) -> complex:
    """<a|b>, conjugate-linear in the first argument."""
    if a.basis != b.basis:
        raise BasisMismatchError(f"bases differ: {a.basis} vs {b.basis}")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def overlap_fidelity(a: StateVector, b: StateVector) -> float:
    """|<a|b>|^2, the transition probability between pure states."""
    return abs(inner_product(a, b)) ** 2


def state_fidelity(a: StateVector, b: StateVector) -> float:
    """Pure-state fidelity |<a|b>|, the modulus of the overlap.

    This is the unsquared convention, so values compose multiplicatively
    over independent subsystems.  Square it to get the transition
    probability reported by overlap_fidelity.
    """
    return abs(inner_product(a, b))


class ModelKind(enum.Enum):
    LMG = "lmg"      # all-to-all Ising + transverse field, collective Dicke basis
    TFI = "tfi"      # nearest-neighbor Ising chain + transverse field
    ANNNI = "annni"  # TFI plus next-nearest-neighbor Ising coupling
    RFTI = "rfti"    # TFI plus random longitudinal fields


_LATTICE_MODELS = (ModelKind.TFI, ModelKind.ANNNI, ModelKind.RFTI)


@dataclass(frozen=True)
class ModelSpec:
    """Model family plus couplings.  chi sets the energy unit (default 1)."""

    model: ModelKind
    n_spins: int
    omega: float
    chi: float = 1.0
    gamma: float = 0.0            # next-nearest-neighbor coupling (ANNNI only)
    disorder_sigma: float = 0.0   # std dev of random longitudinal fields (RFTI only)
    disorder_fields: tuple[float, ...] | None = None  # frozen realization (RFTI only)

    def __post_init__(self):
        if self.n_spins < 2:
            raise ValueError(f"need at least 2 spins, got {self.n_spins}")
        if self.chi < 0:
            raise ValueError("chi must be nonnegative; it sets the energy unit")
        if self.gamma != 0.0 and self.model is not ModelKind.ANNNI:
            raise ValueError("gamma is only meaningful for the ANNNI model")
        if self.model is not ModelKind.RFTI:
            if self.disorder_sigma != 0.0 or self.disorder_fields is not None:
                raise ValueError("disorder parameters are only meaningful for RFTI")
        if self.disorder_fields is not None and len(self.disorder_fields) != self.n_spins:
            raise ValueError(
                f"disorder_fields has {len(self.disorder_fields)} entries for "
                f"{self.n_spins} spins"
            )
        if self.model in _LATTICE_MODELS and self.n_spins > MAX_BITSTRING_SPINS:
            raise ResourceLimitError(
                f"lattice model with N={self.n_spins} exceeds the bitstring cap of "
                f"{MAX_BITSTRING_SPINS} spins"
            )

    @property
    def g(self) -> float:
        """Dimensionless transverse field omega/chi."""
        return self.omega / self.chi

    @property
    def basis(self) -> SpinBasis:
        kind = BasisKind.DICKE_Z if self.model is ModelKind.LMG else BasisKind.BITSTRING
        return SpinBasis(kind, self.n_spins)

    def with_omega(self, omega: float) -> "ModelSpec":
        from dataclasses import replace

        return replace(self, omega=omega)


class SpectrumKind(enum.Enum):
    TRUE_ECHO = "true_echo"      # intensities of a genuine density matrix: real, >= 0
    PSEUDO_ECHO = "pseudo_echo"  # pseudo-echo amplitudes: complex in general
    ANALYTIC = "analytic"        # closed-form ground-state intensities


@dataclass(frozen=True)
class MqcSpectrum:
    """Coherence-order resolved intensities I_m on orders -m_max..+m_max."""

    orders: np.ndarray
    intensities: np.ndarray
    kind: SpectrumKind
    fotoc_at_zero: float | None = None  # when known, checked against sum(I_m)

    def __post_init__(self):
        orders = np.ascontiguousarray(self.orders, dtype=np.int64)
        vals = np.ascontiguousarray(self.intensities, dtype=np.complex128)
        if orders.shape != vals.shape:
            raise ValueError("orders and intensities must have equal shape")
        m_max = int(orders[-1])
        if not np.array_equal(orders, np.arange(-m_max, m_max + 1)):
            raise ValueError("orders must be the full ascending range -m_max..m_max")
        if self.kind in (SpectrumKind.TRUE_ECHO, SpectrumKind.ANALYTIC):
            if self.kind is SpectrumKind.TRUE_ECHO:
                real_atol = nonneg_atol = sym_atol = ECHO_VALIDATION_ATOL
            else:
                real_atol = SPECTRUM_REAL_ATOL
                nonneg_atol = SPECTRUM_NONNEG_ATOL
                sym_atol = SPECTRUM_SYMMETRY_ATOL
            if np.max(np.abs(vals.imag)) > real_atol:
                raise ValueError(
                    f"imaginary residue {np.max(np.abs(vals.imag)):.3e} exceeds "
                    f"{real_atol} for a {self.kind.value} spectrum"
                )
            if np.min(vals.real) < -nonneg_atol:
                raise ValueError(
                    f"negative intensity {np.min(vals.real):.3e} in a "
                    f"{self.kind.value} spectrum"
                )
            asym = np.max(np.abs(vals - vals[::-1]))
            if asym > sym_atol:
                raise ValueError(f"spectrum asymmetry {asym:.3e} exceeds tolerance")
        if self.fotoc_at_zero is not None:
            sum_atol = (SPECTRUM_SUM_ATOL if self.kind is SpectrumKind.ANALYTIC
                        else ECHO_VALIDATION_ATOL)
            total = float(np.sum(vals).real)
            if abs(total - self.fotoc_at_zero) > sum_atol:
                raise ValueError(
                    f"sum of intensities {total!r} deviates from FOTOC(0)="
                    f"{self.fotoc_at_zero!r} beyond {sum_atol}"
                )
        orders.flags.writeable = False
        vals.flags.writeable = False
        object.__setattr__(self, "orders", orders)
        object.__setattr__(self, "intensities", vals)

    @property
    def m_max(self) -> int:
        return int(self.orders[-1])

    def intensity(self, m: int) -> complex:
        if abs(m) > self.m_max:
            raise ValueError(f"order {m} outside stored range +-{self.m_max}")
        return complex(self.intensities[m + self.m_max])


@dataclass(frozen=True)
class FotocCurve:
    """FOTOC values F(phi) on a grid of rotation angles.

    kind tags the provenance; echo and analytic curves must satisfy F(0) = 1.
    """

    phis: np.ndarray
    values: np.ndarray
    kind: SpectrumKind | None = None

    def __post_init__(self):
        phis = np.ascontiguousarray(self.phis, dtype=np.float64)
        vals = np.ascontiguousarray(self.values, dtype=np.float64)
        if phis.shape != vals.shape or phis.ndim != 1:
            raise ValueError("phis and values must be 1-d arrays of equal length")
        echo_kind = self.kind in (SpectrumKind.TRUE_ECHO, SpectrumKind.PSEUDO_ECHO)
        range_atol = ECHO_VALIDATION_ATOL if echo_kind else FOTOC_RANGE_ATOL
        if vals.min() < -range_atol or vals.max() > 1.0 + range_atol:
            raise ValueError(
                f"FOTOC values outside [0, 1]: min={vals.min()!r} max={vals.max()!r}"
            )
        if self.kind in (SpectrumKind.TRUE_ECHO, SpectrumKind.ANALYTIC):
            zero_atol = (ECHO_VALIDATION_ATOL if self.kind is SpectrumKind.TRUE_ECHO
                         else FOTOC_AT_ZERO_ATOL)
            at_zero = vals[phis == 0.0]
            if at_zero.size and abs(at_zero[0] - 1.0) > zero_atol:
                raise ValueError(f"F(0) = {at_zero[0]!r} deviates from 1")
        phis.flags.writeable = False
        vals.flags.writeable = False
        object.__setattr__(self, "phis", phis)
        object.__setattr__(self, "values", vals)


def uniform_phi_grid(n_points: int) -> np.ndarray:
    """n_points uniformly spaced rotation angles on [0, 2*pi)."""
    if n_points < 1:
        raise ValueError("need at least one grid point")
    return 2.0 * np.pi * np.arange(n_points) / n_points
