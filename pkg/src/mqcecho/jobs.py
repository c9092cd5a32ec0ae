"""Named experiment jobs with reproducible file outputs.

A job is a declarative configuration (model, protocol, analysis, output)
that runs one pipeline and writes three files into the output directory:
results.csv (columnar data, units in the header), summary.json (fits,
peaks, bounds), and manifest.json (fully resolved configuration, seeds,
tool version).  Outputs carry no timestamps and all randomness is seeded,
so re-running with the same manifest reproduces every byte.

Independent work items (field points, phase points, disorder seeds) fan
out to a thread pool; results are reduced in input order and written by
the caller thread only, so the worker count never changes the output.
"""

from __future__ import annotations

import csv
import dataclasses
import enum
import importlib.metadata
import io
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import lattice, lmg, qpt, quench, tfi
from .analysis import (
    DerivativeScan,
    PeakSide,
    intensities_from_fotoc,
    locate_peak,
    prominence_ratio,
    qfi_lower_bound,
    second_derivative_scan,
    spectrum_width,
)
from .core import (
    FotocCurve,
    MAX_BITSTRING_SPINS,
    ModelKind,
    ModelSpec,
    ResourceLimitError,
    SpectrumKind,
    StateVector,
    uniform_phi_grid,
)
from .quench import EchoKind

MEMORY_BUDGET_ENV = "MQCECHO_MEMORY_BUDGET"
PROMINENCE_THRESHOLD = 5.0

# crude per-state workspace multiple used by the memory refusal gate;
# propagation and diagonalization engines keep their own tighter guards
_WORKSPACE_STATES = 16
_BYTES_PER_AMPLITUDE = 16


class UsageError(ValueError):
    """Invalid job configuration; the message starts with the field path."""


class JobKind(enum.Enum):
    GROUND_SPECTRUM = "ground-spectrum"
    FOTOC_CURVE = "fotoc-curve"
    ECHO = "echo"
    PSEUDO_ECHO = "pseudo-echo"
    LAA_RAMP = "laa-ramp"
    DERIVATIVE_SCAN = "derivative-scan"
    SCALING_FIT = "scaling-fit"
    DISORDER_SWEEP = "disorder-sweep"


_MODEL_NAMES = {k.name.lower(): k for k in ModelKind}


@dataclass(frozen=True)
class ModelConfig:
    """Model family and couplings; omega is the field for fixed-field jobs."""

    model: str = "lmg"
    n_spins: int = 50
    omega: float = 0.01
    chi: float = 1.0
    gamma: float = 0.0
    disorder_sigma: float = 0.0


@dataclass(frozen=True)
class ProtocolConfig:
    """Ramp and phase-grid settings for echo and ramp jobs.

    steps of None picks the default count for the duration; n_phi of None
    picks the alias-free phase grid 2N + 2.  taus, when nonempty, makes the
    ramp job emit one block per duration.
    """

    tau: float = 10.0
    omega_start: float = 100.0
    omega_stop: float = 0.01
    steps: int | None = None
    n_phi: int | None = None
    schedule: str = "laa"
    taus: tuple[float, ...] = ()


@dataclass(frozen=True)
class AnalysisConfig:
    """Scan grid, finite-difference step, and fit settings."""

    m_max: int | None = None
    fd_step: float = 1e-4
    peak_side: str = "positive"
    omega_min: float = 0.5
    omega_max: float = 1.5
    omega_points: int = 21
    sizes: tuple[int, ...] = ()
    n_seeds: int = 10


@dataclass(frozen=True)
class OutputConfig:
    directory: str = "out"
    formats: tuple[str, ...] = ("csv", "json")


@dataclass(frozen=True)
class JobConfig:
    """One fully specified job run."""

    job: str = "ground-spectrum"
    model: ModelConfig = field(default_factory=ModelConfig)
    protocol: ProtocolConfig = field(default_factory=ProtocolConfig)
    analysis: AnalysisConfig = field(default_factory=AnalysisConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    seed: int = 0
    workers: int = 1

    def kind(self) -> JobKind:
        try:
            return JobKind(self.job)
        except ValueError:
            names = ", ".join(k.value for k in JobKind)
            raise UsageError(f"job: unknown job {self.job!r} (choose from {names})")

    def model_kind(self) -> ModelKind:
        try:
            return _MODEL_NAMES[self.model.model.lower()]
        except KeyError:
            names = ", ".join(sorted(_MODEL_NAMES))
            raise UsageError(
                f"model.model: unknown model {self.model.model!r} "
                f"(choose from {names})"
            )

    def to_dict(self) -> dict:
        """Nested plain-type view with every default resolved."""
        return dataclasses.asdict(self)


_SECTION_TYPES = {
    "model": ModelConfig,
    "protocol": ProtocolConfig,
    "analysis": AnalysisConfig,
    "output": OutputConfig,
}


def _coerce(path: str, value, target_type):
    """Convert a raw config value to the annotated field type."""
    if target_type in ("int", "int | None"):
        if value is None and "None" in target_type:
            return None
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise UsageError(f"{path}: expected an integer, got {value!r}")
        if float(value) != int(value):
            raise UsageError(f"{path}: expected an integer, got {value!r}")
        return int(value)
    if target_type == "float":
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise UsageError(f"{path}: expected a number, got {value!r}")
        return float(value)
    if target_type == "str":
        if not isinstance(value, str):
            raise UsageError(f"{path}: expected a string, got {value!r}")
        return value
    if target_type.startswith("tuple[int"):
        if not isinstance(value, (list, tuple)):
            raise UsageError(f"{path}: expected a list, got {value!r}")
        return tuple(_coerce(f"{path}[{i}]", v, "int") for i, v in enumerate(value))
    if target_type.startswith("tuple[float"):
        if not isinstance(value, (list, tuple)):
            raise UsageError(f"{path}: expected a list, got {value!r}")
        return tuple(_coerce(f"{path}[{i}]", v, "float") for i, v in enumerate(value))
    if target_type.startswith("tuple[str"):
        if not isinstance(value, (list, tuple)):
            raise UsageError(f"{path}: expected a list, got {value!r}")
        return tuple(_coerce(f"{path}[{i}]", v, "str") for i, v in enumerate(value))
    raise UsageError(f"{path}: unsupported value {value!r}")


def _build_section(prefix: str, cls, raw: dict):
    fields = {f.name: f for f in dataclasses.fields(cls)}
    kwargs = {}
    for key, value in raw.items():
        path = f"{prefix}.{key}" if prefix else key
        if key not in fields:
            known = ", ".join(sorted(fields))
            raise UsageError(f"{path}: unknown field (known fields: {known})")
        kwargs[key] = _coerce(path, value, fields[key].type)
    return cls(**kwargs)


def config_from_dict(raw: dict) -> JobConfig:
    """Build a JobConfig from a nested mapping, reporting bad field paths."""
    if not isinstance(raw, dict):
        raise UsageError(f"config: expected a mapping, got {type(raw).__name__}")
    top = {f.name: f for f in dataclasses.fields(JobConfig)}
    kwargs = {}
    for key, value in raw.items():
        if key not in top:
            known = ", ".join(sorted(top))
            raise UsageError(f"{key}: unknown field (known fields: {known})")
        if key in _SECTION_TYPES:
            if not isinstance(value, dict):
                raise UsageError(f"{key}: expected a mapping, got {value!r}")
            kwargs[key] = _build_section(key, _SECTION_TYPES[key], value)
        else:
            kwargs[key] = _coerce(key, value, top[key].type)
    return JobConfig(**kwargs)


def merge_overrides(base: dict, overrides: dict) -> dict:
    """Deep-merge nested override values into a copy of base."""
    merged = dict(base)
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = merge_overrides(merged[key], value)
        else:
            merged[key] = value
    return merged


def apply_assignment(raw: dict, expression: str) -> dict:
    """Apply one dotted key=value override, parsing the value as JSON."""
    if "=" not in expression:
        raise UsageError(f"set: expected key=value, got {expression!r}")
    dotted, text = expression.split("=", 1)
    dotted = dotted.strip()
    if not dotted:
        raise UsageError(f"set: expected key=value, got {expression!r}")
    try:
        value = json.loads(text)
    except json.JSONDecodeError:
        value = text
    node: dict = value
    for part in reversed(dotted.split(".")):
        node = {part: node}
    return merge_overrides(raw, node)


def _validate(cfg: JobConfig) -> None:
    kind = cfg.kind()
    cfg.model_kind()
    m, p, a, o = cfg.model, cfg.protocol, cfg.analysis, cfg.output
    if m.n_spins < 2:
        raise UsageError(f"model.n_spins: need at least 2 spins, got {m.n_spins}")
    if m.chi <= 0.0:
        raise UsageError(f"model.chi: must be positive, got {m.chi}")
    if m.disorder_sigma < 0.0:
        raise UsageError(f"model.disorder_sigma: must be nonnegative, got {m.disorder_sigma}")
    if p.tau <= 0.0:
        raise UsageError(f"protocol.tau: must be positive, got {p.tau}")
    if any(t <= 0.0 for t in p.taus):
        raise UsageError(f"protocol.taus: durations must be positive, got {p.taus}")
    if p.steps is not None and p.steps < 1:
        raise UsageError(f"protocol.steps: need at least one step, got {p.steps}")
    if p.n_phi is not None and p.n_phi < 1:
        raise UsageError(f"protocol.n_phi: need at least one point, got {p.n_phi}")
    if p.schedule not in ("laa", "linear"):
        raise UsageError(f"protocol.schedule: choose laa or linear, got {p.schedule!r}")
    if a.fd_step <= 0.0:
        raise UsageError(f"analysis.fd_step: must be positive, got {a.fd_step}")
    if a.peak_side not in ("positive", "negative"):
        raise UsageError(
            f"analysis.peak_side: choose positive or negative, got {a.peak_side!r}"
        )
    if a.m_max is not None and a.m_max < 0:
        raise UsageError(f"analysis.m_max: must be nonnegative, got {a.m_max}")
    if not a.omega_min < a.omega_max:
        raise UsageError(
            f"analysis.omega_min: grid needs omega_min < omega_max, "
            f"got [{a.omega_min}, {a.omega_max}]"
        )
    if kind in (JobKind.GROUND_SPECTRUM, JobKind.DERIVATIVE_SCAN,
                JobKind.DISORDER_SWEEP) and a.omega_points < 3:
        raise UsageError(
            f"analysis.omega_points: scans need at least 3 points, got {a.omega_points}"
        )
    if any(n < 2 for n in a.sizes):
        raise UsageError(f"analysis.sizes: sizes must be at least 2, got {a.sizes}")
    if kind is JobKind.SCALING_FIT and a.sizes and len(a.sizes) < 4:
        raise UsageError(
            f"analysis.sizes: scaling fits need at least 4 sizes, got {len(a.sizes)}"
        )
    if a.n_seeds < 1:
        raise UsageError(f"analysis.n_seeds: need at least one seed, got {a.n_seeds}")
    if not o.directory:
        raise UsageError("output.directory: must not be empty")
    bad = [f for f in o.formats if f not in ("csv", "json")]
    if bad:
        raise UsageError(f"output.formats: unknown formats {bad} (choose csv, json)")
    if cfg.seed < 0:
        raise UsageError(f"seed: must be a nonnegative integer, got {cfg.seed}")
    if cfg.workers < 0:
        raise UsageError(f"workers: must be nonnegative, got {cfg.workers}")


def _check_memory_budget(cfg: JobConfig) -> None:
    """Refuse runs whose state vectors exceed the configured byte budget."""
    budget_text = os.environ.get(MEMORY_BUDGET_ENV)
    if not budget_text:
        return
    try:
        budget = int(budget_text)
    except ValueError:
        raise UsageError(
            f"{MEMORY_BUDGET_ENV}: expected a byte count, got {budget_text!r}"
        )
    kind = cfg.model_kind()
    sizes = [cfg.model.n_spins]
    if cfg.kind() is JobKind.SCALING_FIT:
        sizes = list(cfg.analysis.sizes) or [1600 if kind is ModelKind.LMG else 5000]
    for n in sizes:
        if kind is ModelKind.LMG:
            dim = n + 1
        elif kind is ModelKind.TFI and n > MAX_BITSTRING_SPINS:
            dim = n + 1  # analytic pipeline stores mode products, not states
        else:
            dim = 2 ** n
        required = dim * _BYTES_PER_AMPLITUDE * _WORKSPACE_STATES
        if required > budget:
            raise ResourceLimitError(
                f"refusing job {cfg.job!r}: N={n} needs about {required} bytes "
                f"of state workspace but {MEMORY_BUDGET_ENV}={budget}; raise the "
                f"budget to at least {required}"
            )


@dataclass(frozen=True)
class ResultTable:
    """Columnar results with units in the column names.

    Rows are plain tuples in a deterministic order fixed by the job, so the
    serialized form is byte-stable for a given manifest.
    """

    columns: tuple[str, ...]
    rows: tuple[tuple, ...]

    def __post_init__(self):
        for row in self.rows:
            if len(row) != len(self.columns):
                raise ValueError(
                    f"row has {len(row)} cells for {len(self.columns)} columns"
                )

    def csv_text(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([_cell(v) for v in row])
        return buf.getvalue()


def _cell(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _json_text(payload: dict) -> str:
    return json.dumps(_plain(payload), indent=2, sort_keys=True) + "\n"


def _plain(value):
    """Recursively convert numpy scalars and arrays to JSON-safe types."""
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    return value


def _tool_version() -> str:
    try:
        return importlib.metadata.version("mqcecho")
    except importlib.metadata.PackageNotFoundError:
        return "unknown"


def _parallel_map(fn: Callable, items: Sequence, workers: int) -> list:
    """Map preserving input order; the caller thread does all writing."""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _resolved_workers(cfg: JobConfig) -> int:
    return cfg.workers if cfg.workers > 0 else (os.cpu_count() or 1)


def _job_seeds(cfg: JobConfig) -> list[int]:
    if cfg.kind() is JobKind.DISORDER_SWEEP:
        return list(range(cfg.seed, cfg.seed + cfg.analysis.n_seeds))
    return [cfg.seed]


def _model_spec(cfg: JobConfig, omega: float | None = None) -> ModelSpec:
    kind = cfg.model_kind()
    m = cfg.model
    om = m.omega if omega is None else float(omega)
    kwargs = {}
    if kind is ModelKind.ANNNI:
        kwargs["gamma"] = m.gamma
    if kind is ModelKind.RFTI:
        fields = lattice.draw_disorder(cfg.seed, m.disorder_sigma, m.n_spins).fields
        kwargs["disorder_sigma"] = m.disorder_sigma
        kwargs["disorder_fields"] = fields
    try:
        return ModelSpec(kind, m.n_spins, omega=om, chi=m.chi, **kwargs)
    except ResourceLimitError:
        raise
    except ValueError as exc:
        raise UsageError(f"model: {exc}")


def _state_spectrum(spec: ModelSpec, state: StateVector, m_max):
    if spec.model is ModelKind.LMG:
        return lmg.DickeSpace(spec.n_spins).mqc_spectrum(state, m_max)
    return lattice.mqc_spectrum_of_state(state, m_max)


def _order_parameter(spec: ModelSpec, state: StateVector) -> float:
    """2<|S_z|>/N in whichever basis the state lives."""
    if spec.model is ModelKind.LMG:
        labels = np.abs(lmg.dicke_m_labels(spec.n_spins))
        raw = float(labels @ (np.abs(state.amplitudes) ** 2))
        return 2.0 * raw / spec.n_spins
    return lattice.order_parameter_abs_sz(state)[1]


def _intensity_scan(cfg: JobConfig):
    """Field-dependent I_0 function for the configured model."""
    kind = cfg.model_kind()
    n = cfg.model.n_spins
    if kind is ModelKind.LMG:
        return qpt.CollectiveIntensityScan(n, cfg.model.chi).i0
    if kind is ModelKind.TFI and n > MAX_BITSTRING_SPINS:
        return qpt.FreeFermionIntensityScan(n, cfg.model.chi).i0
    return qpt.GroundIntensityScan(lambda om: _model_spec(cfg, om)).i0


def _omega_grid(cfg: JobConfig) -> np.ndarray:
    a = cfg.analysis
    return np.linspace(a.omega_min, a.omega_max, a.omega_points)


def _schedule_for(cfg: JobConfig, tau: float | None = None) -> quench.RampSchedule:
    p = cfg.protocol
    tau = p.tau if tau is None else tau
    if p.schedule == "linear":
        return quench.linear_schedule(p.omega_start, p.omega_stop, tau,
                                      steps=p.steps, chi=cfg.model.chi)
    spec = _model_spec(cfg)
    gap = lambda om: quench.instantaneous_gap(spec.with_omega(om))
    return quench.build_laa_schedule(p.omega_start, p.omega_stop, tau, gap,
                                     steps=p.steps, chi=cfg.model.chi)


# one builder per job kind; each returns (table, summary)

def _job_ground_spectrum(cfg: JobConfig, workers: int):
    grid = _omega_grid(cfg)
    m_max = cfg.analysis.m_max

    def point(omega: float):
        spec = _model_spec(cfg, omega)
        state = quench.ground_state_for(spec)
        spectrum = _state_spectrum(spec, state, m_max)
        return spectrum, _order_parameter(spec, state)

    results = _parallel_map(point, grid, workers)
    rows = []
    for omega, (spectrum, order) in zip(grid, results):
        for m, i_m in zip(spectrum.orders, spectrum.intensities):
            rows.append((float(omega), int(m), float(np.real(i_m)), order))
    table = ResultTable(
        ("omega/chi (1)", "m (1)", "I_m (1)", "order_param (2<|Sz|>/N)"),
        tuple(rows),
    )
    summary = {
        "omega_grid": grid,
        "n_spins": cfg.model.n_spins,
        "model": cfg.model.model,
    }
    return table, summary


def _job_fotoc_curve(cfg: JobConfig, workers: int):
    n = cfg.model.n_spins
    n_phi = cfg.protocol.n_phi or 2 * n + 2
    phis = uniform_phi_grid(n_phi)
    analytic = (cfg.model_kind() is ModelKind.TFI and n > MAX_BITSTRING_SPINS)
    if analytic:
        g = cfg.model.omega / cfg.model.chi
        values = tfi.fotoc_product(n, g, phis)
    else:
        spec = _model_spec(cfg)
        g = spec.g
        state = quench.ground_state_for(spec)
        if spec.model is ModelKind.LMG:
            space = lmg.DickeSpace(spec.n_spins)
            chunks = _parallel_map(lambda ps: space.fotoc_values(state, ps),
                                   np.array_split(phis, max(workers, 1)), workers)
        else:
            chunks = _parallel_map(lambda ps: lattice.fotoc_from_weights(state, ps),
                                   np.array_split(phis, max(workers, 1)), workers)
        values = np.concatenate([np.atleast_1d(c) for c in chunks])
    curve = FotocCurve(phis, np.asarray(values, dtype=np.float64),
                       SpectrumKind.ANALYTIC)
    spectrum = intensities_from_fotoc(curve, m_max=cfg.analysis.m_max)
    rows = tuple((float(p), float(v)) for p, v in zip(phis, values))
    table = ResultTable(("phi (rad)", "fotoc (1)"), rows)
    summary = {
        "omega_over_chi": g,
        "intensities": {str(int(m)): float(np.real(i))
                        for m, i in zip(spectrum.orders, spectrum.intensities)},
        "spectrum_width": spectrum_width(spectrum),
        "analytic_pipeline": analytic,
    }
    return table, summary


def _job_echo(cfg: JobConfig, workers: int, kind: EchoKind):
    spec = _model_spec(cfg)
    schedule = _schedule_for(cfg)
    scan = quench.echo_spectrum_scan(spec, schedule, kind=kind,
                                     n_phi=cfg.protocol.n_phi,
                                     m_max=cfg.analysis.m_max)
    ground = quench.ground_mqc_spectrum(spec.with_omega(cfg.protocol.omega_stop),
                                        m_max=cfg.analysis.m_max)
    g_by_m = dict(zip(ground.orders.tolist(), ground.intensities))
    rows = []
    for m, i_m in zip(scan.spectrum.orders, scan.spectrum.intensities):
        g = g_by_m.get(int(m), 0.0)
        rows.append((int(m), float(np.real(i_m)), float(np.imag(i_m)),
                     float(abs(i_m)), float(np.real(g))))
    table = ResultTable(
        ("m (1)", "Itilde_m_re (1)", "Itilde_m_im (1)", "Itilde_m_abs (1)",
         "I_m_ground (1)"),
        tuple(rows),
    )
    summary = {
        "kind": kind.value,
        "chi_tau": cfg.model.chi * schedule.tau,
        "steps": schedule.steps,
        "return_fidelity": scan.return_fidelity,
        "ground_fidelity": scan.ground_fidelity,
        "spectrum_width": spectrum_width(scan.spectrum),
        "n_phi": len(scan.phis),
    }
    if kind is EchoKind.PSEUDO:
        true_spectrum = _state_spectrum(spec, scan.forward_state,
                                        cfg.analysis.m_max)
        check = quench.curvature_bound_check(true_spectrum, scan.spectrum)
        summary["curvature"] = {
            "true_moment": check.true_moment,
            "pseudo_moment": check.pseudo_moment,
            "bound_holds": check.bound_holds,
            "qfi_lower_bound": check.qfi_lower_bound,
        }
    else:
        summary["qfi_lower_bound"] = qfi_lower_bound(scan.spectrum)
    return table, summary


def _job_laa_ramp(cfg: JobConfig, workers: int):
    spec = _model_spec(cfg)
    taus = cfg.protocol.taus or (cfg.protocol.tau,)
    chi = cfg.model.chi

    def one(tau: float):
        schedule = _schedule_for(cfg, tau)
        gaps = np.array([quench.instantaneous_gap(spec.with_omega(om))
                         for om in schedule.omegas])
        return schedule, gaps

    results = _parallel_map(one, taus, workers)
    rows = []
    summary_ramps = {}
    for tau, (schedule, gaps) in zip(taus, results):
        for t, om, gap in zip(schedule.times, schedule.omegas, gaps):
            rows.append((chi * tau, chi * t, om / chi, gap / chi))
        summary_ramps[repr(float(chi * tau))] = {
            "steps": schedule.steps,
            "min_gap_over_chi": float(gaps.min()) / chi,
            "omega_start": schedule.omega_start,
            "omega_end": schedule.omega_end,
        }
    table = ResultTable(
        ("chi*tau (1)", "chi*t (1)", "omega/chi (1)", "gap/chi (1)"),
        tuple(rows),
    )
    return table, {"schedule": cfg.protocol.schedule, "ramps": summary_ramps}


def _job_derivative_scan(cfg: JobConfig, workers: int):
    fn = _intensity_scan(cfg)
    grid = _omega_grid(cfg)
    h = cfg.analysis.fd_step
    side = PeakSide.POSITIVE if cfg.analysis.peak_side == "positive" \
        else PeakSide.NEGATIVE
    scan = second_derivative_scan(fn, grid, fd_step=h)
    rows = tuple((float(om), float(v), float(d2))
                 for om, v, d2 in zip(scan.omegas, scan.values,
                                      scan.second_derivative))
    table = ResultTable(
        ("omega/chi (1)", "I_0 (1)", "d2I_0/domega2 (1/chi^2)"), rows)
    summary = {"fd_step": h, "peak_side": cfg.analysis.peak_side,
               "prominence": prominence_ratio(scan.second_derivative)}
    try:
        est = locate_peak(scan, side=side)
    except ValueError:
        summary["peak"] = None
    else:
        cell = float(grid[1] - grid[0])
        refined = qpt.transition_peak(fn, est.position - cell,
                                      est.position + cell, fd_step=h, side=side)
        summary["peak"] = {"position": refined.position,
                           "height": refined.height}
    return table, summary


def _job_scaling_fit(cfg: JobConfig, workers: int):
    kind = cfg.model_kind()
    sizes = cfg.analysis.sizes
    if kind is ModelKind.LMG:
        if sizes:
            # widen the scan window so the smallest size's peak, a distance
            # of order N^(-2/3) below the critical field, stays bracketed
            lo = max(0.05, 1.0 - 8.0 * min(sizes) ** -0.65)
            result = qpt.lmg_peak_scaling(sizes, window=(lo, 1.02),
                                          coarse_points=60,
                                          fd_step=cfg.analysis.fd_step)
        else:
            result = qpt.lmg_peak_scaling(fd_step=cfg.analysis.fd_step)
    elif kind is ModelKind.TFI:
        result = qpt.tfi_peak_scaling(sizes or (200, 500, 1000, 2000, 5000),
                                      fd_step=cfg.analysis.fd_step)
    else:
        raise UsageError(
            "model.model: scaling-fit supports lmg and tfi, "
            f"got {cfg.model.model!r}"
        )
    rows = tuple(
        (int(n), float(p), float(1.0 - p), float(h0), float(h2))
        for n, p, h0, h2 in zip(result.sizes, result.positions,
                                result.heights0, result.heights2)
    )
    table = ResultTable(
        ("N (1)", "peak_omega/chi (1)", "one_minus_peak (1)",
         "d2I0_peak (1/chi^2)", "d2I2_peak (1/chi^2)"),
        rows,
    )

    def fit_dict(fit):
        return {"exponent": fit.exponent, "exponent_stderr": fit.exponent_stderr,
                "amplitude": fit.amplitude}

    summary = {
        "location_fit": fit_dict(result.location_fit),
        "height0_fit": fit_dict(result.height0_fit),
        "height2_fit": fit_dict(result.height2_fit),
    }
    return table, summary


def _job_disorder_sweep(cfg: JobConfig, workers: int):
    if cfg.model_kind() is not ModelKind.RFTI:
        raise UsageError(
            f"model.model: disorder-sweep needs the rfti model, got {cfg.model.model!r}"
        )
    grid = _omega_grid(cfg)
    h = cfg.analysis.fd_step
    seeds = _job_seeds(cfg)
    n = cfg.model.n_spins
    sigma = cfg.model.disorder_sigma

    def one(seed: int):
        return qpt.disorder_averaged_curve(n, sigma, [seed], grid,
                                           fd_step=h, chi=cfg.model.chi)

    scans = _parallel_map(one, seeds, workers)
    values = np.mean([s.values for s in scans], axis=0)
    seconds = np.mean([s.second_derivative for s in scans], axis=0)
    rows = tuple((float(om), float(v), float(d2))
                 for om, v, d2 in zip(grid, values, seconds))
    table = ResultTable(
        ("omega/chi (1)", "avg_I_0 (1)", "d2_avg_I_0/domega2 (1/chi^2)"), rows)
    try:
        prominence = prominence_ratio(seconds)
    except ValueError:
        prominence = None
    summary = {
        "sigma": sigma,
        "n_seeds": len(seeds),
        "prominence": prominence,
        "prominence_threshold": PROMINENCE_THRESHOLD,
        "peak_prominent": None if prominence is None
        else bool(prominence >= PROMINENCE_THRESHOLD),
    }
    averaged = DerivativeScan(grid, values, seconds, h)
    try:
        est = locate_peak(averaged, side=PeakSide.POSITIVE)
    except ValueError:
        summary["peak"] = None
    else:
        summary["peak"] = {"position": est.position, "height": est.height}
    return table, summary


_BUILDERS = {
    JobKind.GROUND_SPECTRUM: _job_ground_spectrum,
    JobKind.FOTOC_CURVE: _job_fotoc_curve,
    JobKind.LAA_RAMP: _job_laa_ramp,
    JobKind.DERIVATIVE_SCAN: _job_derivative_scan,
    JobKind.SCALING_FIT: _job_scaling_fit,
    JobKind.DISORDER_SWEEP: _job_disorder_sweep,
}


@dataclass(frozen=True)
class RunResult:
    """Everything one job run produced, plus where it was written."""

    config: JobConfig
    table: ResultTable
    summary: dict
    manifest: dict
    paths: tuple[Path, ...]


def build_manifest(cfg: JobConfig) -> dict:
    return {
        "tool": "mqcecho",
        "version": _tool_version(),
        "job": cfg.job,
        "config": cfg.to_dict(),
        "seeds": _job_seeds(cfg),
    }


def run_job(cfg: JobConfig) -> RunResult:
    """Validate, run, and persist one job.

    Writes results.csv (when csv is among the formats), summary.json (when
    json is), and manifest.json always, into the configured directory.
    """
    _validate(cfg)
    _check_memory_budget(cfg)
    workers = _resolved_workers(cfg)
    kind = cfg.kind()
    if kind is JobKind.ECHO:
        table, summary = _job_echo(cfg, workers, EchoKind.IDEAL)
    elif kind is JobKind.PSEUDO_ECHO:
        table, summary = _job_echo(cfg, workers, EchoKind.PSEUDO)
    else:
        table, summary = _BUILDERS[kind](cfg, workers)
    summary = {"job": cfg.job, **summary}
    manifest = build_manifest(cfg)

    out_dir = Path(cfg.output.directory)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    if "csv" in cfg.output.formats:
        path = out_dir / "results.csv"
        path.write_text(table.csv_text())
        paths.append(path)
    if "json" in cfg.output.formats:
        path = out_dir / "summary.json"
        path.write_text(_json_text(summary))
        paths.append(path)
    manifest_path = out_dir / "manifest.json"
    manifest_path.write_text(_json_text(manifest))
    paths.append(manifest_path)
    return RunResult(cfg, table, summary, manifest, tuple(paths))


@dataclass(frozen=True)
class CatalogEntry:
    """One named reproduction recipe with an expected runtime tag."""

    name: str
    job: str
    runtime: str
    description: str
    overrides: dict

    def config(self) -> JobConfig:
        return config_from_dict(merge_overrides({"job": self.job}, self.overrides))


def list_jobs() -> tuple[CatalogEntry, ...]:
    """Catalog of named runs, CI-scale unless tagged long-running."""
    return (
        CatalogEntry(
            "tfi-ground-spectrum", "ground-spectrum", "minutes",
            "coherence spectrum and order parameter of the N=20 chain "
            "ground state across the transition",
            {"model": {"model": "tfi", "n_spins": 20, "omega": 1.0},
             "analysis": {"omega_min": 0.05, "omega_max": 2.0,
                          "omega_points": 40, "m_max": 10}},
        ),
        CatalogEntry(
            "lmg-pseudo-echo", "pseudo-echo", "minutes",
            "N=50 collective-model pseudo-echo after a chi*tau=100 "
            "gap-adapted ramp, with the ground-state spectrum for comparison",
            {"model": {"model": "lmg", "n_spins": 50, "omega": 0.01},
             "protocol": {"tau": 100.0, "omega_start": 100.0,
                          "omega_stop": 0.01}},
        ),
        CatalogEntry(
            "fig3-tfi-n20", "pseudo-echo", "long-running (hours)",
            "N=20 chain pseudo-echo after a chi*tau=100 gap-adapted ramp; "
            "the Krylov propagation of 2^20 amplitudes dominates",
            {"model": {"model": "tfi", "n_spins": 20, "omega": 0.01},
             "protocol": {"tau": 100.0, "omega_start": 100.0,
                          "omega_stop": 0.01}},
        ),
        CatalogEntry(
            "figS1-laa-ramps", "laa-ramp", "fast (seconds)",
            "gap-adapted field trajectories for chi*tau in {3, 10, 30, 100} "
            "on the N=50 collective model",
            {"model": {"model": "lmg", "n_spins": 50, "omega": 0.01},
             "protocol": {"taus": [3.0, 10.0, 30.0, 100.0],
                          "omega_start": 100.0, "omega_stop": 0.01}},
        ),
        CatalogEntry(
            "lmg-scaling", "scaling-fit", "fast (seconds)",
            "transition-peak location and height scaling for the collective "
            "model, N in {200, 400, 800, 1600}",
            {"model": {"model": "lmg", "n_spins": 200}},
        ),
        CatalogEntry(
            "tfi-scaling", "scaling-fit", "fast (seconds)",
            "transition-peak scaling for the chain through the mode-product "
            "pipeline, N in {200, 500, 1000, 2000, 5000}",
            {"model": {"model": "tfi", "n_spins": 200}},
        ),
        CatalogEntry(
            "annni-critical-points", "derivative-scan", "long-running (tens of minutes)",
            "d2 I_0 peak of the N=20 chain with next-nearest-neighbour "
            "coupling gamma=0.3; rerun with gamma=-0.2 and 0.0 for the "
            "other critical points",
            {"model": {"model": "annni", "n_spins": 20, "gamma": 0.3},
             "analysis": {"omega_min": 1.40, "omega_max": 1.56,
                          "omega_points": 11}},
        ),
        CatalogEntry(
            "figS5-rfti-disorder", "disorder-sweep", "long-running (hours)",
            "disorder-averaged d2 I_0 of the N=20 random-field chain, "
            "100 seeded realizations at sigma=0.1",
            {"model": {"model": "rfti", "n_spins": 20, "disorder_sigma": 0.1},
             "analysis": {"omega_min": 0.5, "omega_max": 1.5,
                          "omega_points": 21, "n_seeds": 100}},
        ),
    )


def catalog_entry(name: str) -> CatalogEntry | None:
    for entry in list_jobs():
        if entry.name == name:
            return entry
    return None
