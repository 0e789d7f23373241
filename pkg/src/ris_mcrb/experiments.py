"""Seeded sweep runners for the three experiment families, plus CSV output.

Each runner takes a SweepRequest, evaluates one bound report per grid
point, and returns a SweepResult whose rows are ordered by the sweep
grids. Impedances are computed once per (size, spacing) and reused across
the transmit-power grid. The RIS load sequence always comes from the
dedicated load substream of the master seed, so every spacing and size
sees the same draw order; noise streams are keyed by the transmit-power
value, so dropping a grid point never changes the remaining rows.
"""

from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .bounds import BoundReport, bias_trace, inverse_gram_trace, mc_rmse
from .channel import model_pair, noise_seed, sample_loads
from .errors import ComputationError, annotate
from .impedance import DEFAULT_QUADRATURE, QuadratureSpec, build_impedance_set, mutual_impedance
from .scenario import Radiator, Scenario, dbm_to_watts

SWEEP_KINDS = ("lb_vs_power", "bias_vs_spacing", "crlb_vs_spacing", "mc_rmse")

# Default grids for the standard experiment setups.
DEFAULT_POWER_GRID_DBM = [float(p) for p in range(-10, 81, 10)]
DEFAULT_LB_SPACINGS = [0.02, 0.1, 0.5]
DEFAULT_SPACING_GRID = [0.002, 0.005, 0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0, 2.5]
DEFAULT_SIZES = [(4, 4), (8, 8), (12, 12)]
DEFAULT_CRLB_POWER_DBM = 40.0


@dataclass(frozen=True)
class SweepRequest:
    """One experiment family instance; grids must be strictly increasing."""

    kind: str
    scenario: Scenario
    power_grid: list[float] = field(default_factory=list)
    spacing_grid: list[float] = field(default_factory=list)
    sizes: list[tuple[int, int]] = field(default_factory=list)
    trials: int = 0
    matched: bool = False
    noiseless: bool = False

    def __post_init__(self):
        if self.kind not in SWEEP_KINDS:
            raise ValueError(f"unknown sweep kind {self.kind!r}")
        for name, grid in (("power_grid", self.power_grid),
                           ("spacing_grid", self.spacing_grid)):
            if any(b <= a for a, b in zip(grid, grid[1:])):
                raise ValueError(f"{name} must be strictly increasing")
        if self.kind in ("lb_vs_power", "mc_rmse"):
            if not self.power_grid:
                raise ValueError("power_grid must not be empty")
        if not self.spacing_grid:
            raise ValueError("spacing_grid must not be empty")
        if self.kind in ("bias_vs_spacing", "crlb_vs_spacing") and not self.sizes:
            raise ValueError("sizes must not be empty")
        if self.kind == "mc_rmse" and self.trials < 1:
            raise ValueError("mc_rmse sweeps need trials >= 1")
        if self.trials < 0:
            raise ValueError("trials must be >= 0")


@dataclass
class SweepResult:
    """Rows of (independent variables, bound report) in grid order."""

    kind: str
    rows: list[tuple[dict, BoundReport | None]]
    metadata: dict


@dataclass(frozen=True)
class _PointModels:
    d_true: object
    d_est: object
    x_true: np.ndarray
    n1: int
    n2: int


def _build_point(scenario: Scenario, d_over_lambda: float,
                 n1: int | None = None, n2: int | None = None,
                 quad: QuadratureSpec = DEFAULT_QUADRATURE) -> _PointModels:
    overrides = {"ris_spacing_over_lambda": float(d_over_lambda)}
    if n1 is not None:
        overrides["ris_n1"] = int(n1)
    if n2 is not None:
        overrides["ris_n2"] = int(n2)
    sc = scenario.with_overrides(**overrides)
    impedances = build_impedance_set(sc.tx, sc.rx, sc.ris_radiators(),
                                     sc.constants, quad)
    loads = sample_loads(sc)
    d_true, d_est, x_true = model_pair(impedances, loads)
    return _PointModels(d_true=d_true, d_est=d_est, x_true=x_true,
                        n1=sc.ris.n1, n2=sc.ris.n2)


def _power_sweep(request: SweepRequest, *, want_rmse: bool,
                 quad: QuadratureSpec, model_sink=None) -> SweepResult:
    scenario = request.scenario
    sigma2 = scenario.noise.sigma2
    started = time.perf_counter()

    per_spacing = []
    for d in request.spacing_grid:
        try:
            point = _build_point(scenario, d, quad=quad)
            d_est = point.d_true if request.matched else point.d_est
            per_spacing.append((
                point,
                d_est,
                inverse_gram_trace(d_est),
                0.0 if request.matched else bias_trace(d_est, point.d_true, point.x_true),
                inverse_gram_trace(point.d_true),
            ))
        except ComputationError as exc:
            raise annotate(exc, f"spacing {d} lambda") from exc
        if model_sink is not None:
            model_sink(d, point.n1, point.n2, point.d_true, d_est)

    rows = []
    for p_dbm in request.power_grid:
        p_t = dbm_to_watts(p_dbm)
        gamma = p_t / sigma2
        for d, (point, d_est, tr_gram_est, tr_bias, tr_gram_true) in zip(
                request.spacing_grid, per_spacing):
            tr_mcrb = tr_gram_est / (2.0 * gamma)
            rmse = None
            if want_rmse:
                try:
                    rmse = mc_rmse(
                        scenario, d_est, point.d_true, point.x_true, p_t,
                        request.trials, noise_seed(scenario.rng_seed, p_dbm),
                        noiseless=request.noiseless,
                    )
                except ComputationError as exc:
                    raise annotate(
                        exc, f"power {p_dbm} dBm, spacing {d} lambda") from exc
            report = BoundReport(
                p_t=p_t,
                gamma=gamma,
                tr_mcrb=tr_mcrb,
                tr_bias=tr_bias,
                lb=float(np.sqrt(tr_mcrb + tr_bias)),
                crlb=float(np.sqrt(tr_gram_true / (2.0 * gamma))),
                rmse=rmse,
            )
            rows.append(({"p_t_dbm": p_dbm, "d_over_lambda": d}, report))
    return SweepResult(kind=request.kind, rows=rows,
                       metadata=_metadata(scenario, started))


def run_lb_vs_power(request: SweepRequest,
                    quad: QuadratureSpec = DEFAULT_QUADRATURE,
                    model_sink=None) -> SweepResult:
    """Bounds (and optionally estimator RMSE) over a transmit-power grid,
    one curve per RIS element spacing."""
    if request.kind != "lb_vs_power":
        raise ValueError(f"expected kind 'lb_vs_power', got {request.kind!r}")
    return _power_sweep(request, want_rmse=request.trials > 0, quad=quad,
                        model_sink=model_sink)


def run_mc_rmse(request: SweepRequest,
                quad: QuadratureSpec = DEFAULT_QUADRATURE,
                model_sink=None) -> SweepResult:
    """Monte-Carlo estimator RMSE alongside the bounds over a power grid."""
    if request.kind != "mc_rmse":
        raise ValueError(f"expected kind 'mc_rmse', got {request.kind!r}")
    return _power_sweep(request, want_rmse=True, quad=quad,
                        model_sink=model_sink)


def run_bias_vs_spacing(request: SweepRequest,
                        quad: QuadratureSpec = DEFAULT_QUADRATURE) -> SweepResult:
    """SNR-independent error floor versus element spacing, per RIS size."""
    if request.kind != "bias_vs_spacing":
        raise ValueError(f"expected kind 'bias_vs_spacing', got {request.kind!r}")
    scenario = request.scenario
    started = time.perf_counter()
    rows = []
    for d in request.spacing_grid:
        for n1, n2 in request.sizes:
            try:
                point = _build_point(scenario, d, n1, n2, quad=quad)
                tr_bias = bias_trace(point.d_est, point.d_true, point.x_true)
            except ComputationError as exc:
                raise annotate(exc, f"spacing {d} lambda, size {n1}x{n2}") from exc
            report = BoundReport(p_t=None, gamma=None, tr_mcrb=None,
                                 tr_bias=tr_bias, lb=None)
            rows.append(({"d_over_lambda": d, "n1": n1, "n2": n2}, report))
    return SweepResult(kind=request.kind, rows=rows,
                       metadata=_metadata(scenario, started))


def run_crlb_vs_spacing(request: SweepRequest,
                        quad: QuadratureSpec = DEFAULT_QUADRATURE) -> SweepResult:
    """Matched-model bound versus element spacing at one fixed power."""
    if request.kind != "crlb_vs_spacing":
        raise ValueError(f"expected kind 'crlb_vs_spacing', got {request.kind!r}")
    if len(request.power_grid) != 1:
        raise ValueError("crlb_vs_spacing uses exactly one transmit power")
    scenario = request.scenario
    p_t = dbm_to_watts(request.power_grid[0])
    gamma = p_t / scenario.noise.sigma2
    started = time.perf_counter()
    rows = []
    for d in request.spacing_grid:
        for n1, n2 in request.sizes:
            try:
                point = _build_point(scenario, d, n1, n2, quad=quad)
                tr = inverse_gram_trace(point.d_true)
            except ComputationError as exc:
                raise annotate(exc, f"spacing {d} lambda, size {n1}x{n2}") from exc
            bound = float(np.sqrt(tr / (2.0 * gamma)))
            report = BoundReport(p_t=p_t, gamma=gamma, tr_mcrb=tr / (2.0 * gamma),
                                 tr_bias=0.0, lb=bound, crlb=bound)
            rows.append(({"d_over_lambda": d, "n1": n1, "n2": n2}, report))
    return SweepResult(kind=request.kind, rows=rows,
                       metadata=_metadata(scenario, started))


def run_impedance_sweep(scenario: Scenario, distances_over_lambda: list[float],
                        quad: QuadratureSpec = DEFAULT_QUADRATURE) -> SweepResult:
    """Mutual impedance of two side-by-side elements versus separation."""
    if not distances_over_lambda:
        raise ValueError("distance grid must not be empty")
    if any(b <= a for a, b in zip(distances_over_lambda, distances_over_lambda[1:])):
        raise ValueError("distance grid must be strictly increasing")
    started = time.perf_counter()
    h = scenario.element_half_length
    r = scenario.element_wire_radius
    lam = scenario.constants.wavelength
    first = Radiator(np.zeros(3), h, r)
    rows = []
    for d in distances_over_lambda:
        second = Radiator(np.array([d * lam, 0.0, 0.0]), h, r)
        z = mutual_impedance(first, second, scenario.constants, quad)
        rows.append((
            {"d_over_lambda": d, "re_z_ohm": z.real, "im_z_ohm": z.imag,
             "abs_z_ohm": abs(z)},
            None,
        ))
    return SweepResult(kind="impedance_sweep", rows=rows,
                       metadata=_metadata(scenario, started))


def _metadata(scenario: Scenario, started: float) -> dict:
    return {
        "scenario": dict(scenario.config),
        "master_seed": scenario.rng_seed,
        "version": __version__,
        "wall_clock_s": time.perf_counter() - started,
    }


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _csv_columns(result: SweepResult) -> list[str]:
    if result.kind in ("lb_vs_power", "mc_rmse"):
        cols = ["p_t_dbm", "d_over_lambda", "tr_mcrb", "tr_bias", "lb", "crlb"]
        if any(rep is not None and rep.rmse is not None for _, rep in result.rows) \
                or result.kind == "mc_rmse":
            cols.append("rmse")
        return cols
    if result.kind == "bias_vs_spacing":
        return ["d_over_lambda", "n1", "n2", "sqrt_tr_bias"]
    if result.kind == "crlb_vs_spacing":
        return ["d_over_lambda", "n1", "n2", "crlb"]
    if result.kind == "impedance_sweep":
        return ["d_over_lambda", "re_z_ohm", "im_z_ohm", "abs_z_ohm"]
    raise ValueError(f"unknown sweep kind {result.kind!r}")


def _row_value(column: str, variables: dict, report: BoundReport | None):
    if column in variables:
        return variables[column]
    if report is None:
        return None
    if column == "sqrt_tr_bias":
        return float(np.sqrt(report.tr_bias))
    return getattr(report, column)


def csv_text(result: SweepResult) -> str:
    """Render a sweep result as CSV with round-trip-exact float formatting."""
    columns = _csv_columns(result)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for variables, report in result.rows:
        writer.writerow([_fmt(_row_value(c, variables, report)) for c in columns])
    return buf.getvalue()


def emit_csv(result: SweepResult, path) -> None:
    """Write the sweep CSV; byte output is a pure function of the rows."""
    text = csv_text(result)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def dump_model_csv(b: np.ndarray, path) -> None:
    """Serialize a complex model matrix row-major as re,im column pairs."""
    b = np.asarray(b, dtype=complex)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        header = []
        for j in range(b.shape[1]):
            header += [f"re_{j}", f"im_{j}"]
        writer.writerow(header)
        for row in b:
            out = []
            for v in row:
                out += [repr(float(v.real)), repr(float(v.imag))]
            writer.writerow(out)
