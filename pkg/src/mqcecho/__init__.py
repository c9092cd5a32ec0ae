"""Multiple-quantum-coherence spectra of spin-model ground states.

Simulates and analyzes the coherence-order distribution I_m read out by
collective-rotation echoes: analytic fidelity out-of-time-order
correlators for the transverse-field chain, exact solves for the
collective (infinite-range) model and short chains, gap-adapted ramp
protocols with ideal and pseudo echoes, and transition-locating scans of
the intensities with finite-size scaling fits.
"""

from .analysis import (
    DerivativeScan,
    DisorderAverage,
    PeakEstimate,
    PeakSide,
    ScalingFit,
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
from .core import (
    BasisKind,
    BasisMismatchError,
    ConvergenceError,
    FotocCurve,
    ModelKind,
    ModelSpec,
    MqcSpectrum,
    ResourceLimitError,
    SpectrumKind,
    SpinBasis,
    StateVector,
    overlap_fidelity,
    state_fidelity,
    uniform_phi_grid,
)
from .jobs import (
    JobConfig,
    JobKind,
    ResultTable,
    RunResult,
    UsageError,
    list_jobs,
    run_job,
)
from .lattice import (
    SparseSpinHamiltonian,
    apply_global_x_rotation,
    draw_disorder,
    fotoc_from_weights,
    fotoc_of_state,
    lanczos_ground_state,
    lanczos_lowest,
    mqc_spectrum_of_state,
    order_parameter_abs_sz,
    x_basis_weights,
)
from .lmg import (
    DickeSpace,
    LmgHamiltonian,
    build_lmg,
    dicke_m_labels,
    ghz_spectrum,
    ghz_state,
    hp_intensity,
    hp_spectrum,
    lmg_even_ground_state,
    lmg_ground_state,
    squeeze_parameter,
)
from .qpt import (
    CollectiveIntensityScan,
    FreeFermionIntensityScan,
    GroundIntensityScan,
    PeakScalingResult,
    annni_scan,
    clean_chain_scan,
    disorder_averaged_curve,
    lmg_peak_scaling,
    refine_disorder_peak,
    tfi_peak_scaling,
    transition_peak,
)
from .quench import (
    EchoKind,
    EchoResult,
    EchoScan,
    RampEngine,
    RampSchedule,
    build_laa_schedule,
    curvature_bound_check,
    echo_spectrum_scan,
    ground_mqc_spectrum,
    ground_state_for,
    instantaneous_gap,
    linear_schedule,
    propagate_step,
    ramp_ground_fidelity,
    run_ideal_echo,
    run_pseudo_echo,
    run_ramp,
)
from .tfi import (
    critical_spectrum,
    fotoc_closed_form,
    fotoc_curve,
    fotoc_product,
)

__all__ = [
    "BasisKind",
    "BasisMismatchError",
    "CollectiveIntensityScan",
    "ConvergenceError",
    "DerivativeScan",
    "DickeSpace",
    "DisorderAverage",
    "EchoKind",
    "EchoResult",
    "EchoScan",
    "FotocCurve",
    "FreeFermionIntensityScan",
    "GroundIntensityScan",
    "JobConfig",
    "JobKind",
    "LmgHamiltonian",
    "ModelKind",
    "ModelSpec",
    "MqcSpectrum",
    "PeakEstimate",
    "PeakScalingResult",
    "PeakSide",
    "RampEngine",
    "RampSchedule",
    "ResourceLimitError",
    "ResultTable",
    "RunResult",
    "ScalingFit",
    "SparseSpinHamiltonian",
    "SpectrumKind",
    "SpinBasis",
    "StateVector",
    "UsageError",
    "annni_scan",
    "apply_global_x_rotation",
    "build_laa_schedule",
    "build_lmg",
    "clean_chain_scan",
    "critical_spectrum",
    "curvature_bound_check",
    "dicke_m_labels",
    "disorder_average",
    "disorder_averaged_curve",
    "draw_disorder",
    "echo_spectrum_scan",
    "fit_power_law",
    "fotoc_closed_form",
    "fotoc_curve",
    "fotoc_from_weights",
    "fotoc_of_state",
    "fotoc_product",
    "ghz_spectrum",
    "ghz_state",
    "ground_mqc_spectrum",
    "ground_state_for",
    "hp_intensity",
    "hp_spectrum",
    "instantaneous_gap",
    "intensities_from_fotoc",
    "lanczos_ground_state",
    "lanczos_lowest",
    "linear_schedule",
    "list_jobs",
    "lmg_even_ground_state",
    "lmg_ground_state",
    "lmg_peak_scaling",
    "locate_peak",
    "mqc_spectrum_of_state",
    "order_parameter_abs_sz",
    "overlap_fidelity",
    "peak_from_samples",
    "prominence_ratio",
    "propagate_step",
    "qfi_lower_bound",
    "ramp_ground_fidelity",
    "refine_disorder_peak",
    "refine_peak",
    "run_ideal_echo",
    "run_job",
    "run_pseudo_echo",
    "run_ramp",
    "second_derivative_scan",
    "spectrum_width",
    "squeeze_parameter",
    "state_fidelity",
    "tfi_peak_scaling",
    "transition_peak",
    "uniform_phi_grid",
    "x_basis_weights",
]
