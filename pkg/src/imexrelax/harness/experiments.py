"""Experiment drivers: convergence studies, eps sweeps, steady-state and
KLF demonstrations, with CSV-ready reports.

Self-convergence uses grid-ladder ratio 3 so coarse points align exactly
with fine ones (middle cell of each triple for cell-centered grids, every
third node otherwise); errors are then plain pointwise differences and the
observed order is log3 of their ratio.
"""

from __future__ import annotations

import dataclasses
import math
import time

import numpy as np

from ..errors import BlowUpError, ConfigurationError, StageSolveError, StateError
from ..integrator import StepControl, integrate
from ..models import (
    PenalizationConfig,
    broadwell_system,
    constant_mu,
    diffusive2x2_system,
    klf_system,
    r13_steady_state,
    r13_system,
)
from ..models.vdp import vdp_default_state, vdp_system
from ..r13_boundary import BC_123, BC_124
from ..spatial import CELLS, GHOST, NODES, PERIODIC, Grid1D
from ..tableau import get_scheme
from .config import ExperimentConfig
from .report import FLAG_ABORT, FLAG_DEGRADED, ExperimentReport, ReportRow

RUN_ERRORS = (BlowUpError, StageSolveError, StateError)
SNAPSHOT_TIMES = (0.5, 1.0, 1.5, 3.0, 10.0)


# ---------------------------------------------------------------------------
# small numerics
# ---------------------------------------------------------------------------


def error_norm(a, b, norm: str, dx: float = 1.0) -> float:
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"size mismatch {a.shape} vs {b.shape}")
    diff = np.abs(a - b)
    if norm == "l1":
        return float(diff.sum() * dx)
    if norm == "linf":
        return float(diff.max())
    raise ValueError(f"unknown norm {norm!r}")


def convergence_rate_log3(e1: float, e2: float) -> float:
    """p = log3(E_dt1 / E_dt2) for a tripled-resolution pair."""
    if e1 <= 0.0 or e2 <= 0.0:
        raise ValueError("convergence rate needs positive errors")
    return math.log(e1 / e2) / math.log(3.0)


def observed_order(e1: float, e2: float, ratio: float) -> float:
    if e1 <= 0.0 or e2 <= 0.0 or ratio <= 1.0:
        return float("nan")
    return math.log(e1 / e2) / math.log(ratio)


def restrict_by3(fine: np.ndarray, node_kind: str) -> np.ndarray:
    """Exact-index restriction from a 3x finer grid (last axis)."""
    if node_kind == CELLS:
        return fine[..., 1::3]
    return fine[..., 0::3]


def self_convergence_errors(coarse, fine, norm: str, dx_coarse: float, node_kind: str = CELLS):
    """Per-component norms of coarse minus restricted fine solution.
    Equal lengths compare directly (ODE step-count ladders)."""
    if fine.shape[-1] == coarse.shape[-1]:
        rest = fine
    elif fine.shape[-1] == 3 * coarse.shape[-1]:
        rest = restrict_by3(fine, node_kind)
    else:
        raise ValueError("self-convergence comparator needs refinement ratio 3")
    return np.array(
        [error_norm(coarse[k], rest[k], norm, dx_coarse) for k in range(coarse.shape[0])]
    )


def oscillation_indicator(u: np.ndarray, window: int | None = None) -> int:
    """Sign changes of the second difference near extrema of u.

    Smooth profiles give ~0 (curvature keeps its sign around an extremum);
    grid-scale wiggles produce counts that grow with the number of
    oscillating cells.
    """
    u = np.asarray(u)
    n = u.shape[0]
    w = window if window is not None else max(3, n // 32)
    du = np.diff(u)
    ext = np.where(du[:-1] * du[1:] < 0.0)[0] + 1
    mask = np.zeros(n, dtype=bool)
    for j in ext:
        mask[max(0, j - w) : min(n, j + w + 1)] = True
    d2 = u[2:] - 2.0 * u[1:-1] + u[:-2]
    inner = mask[1:-1]
    count = 0
    for a in range(d2.shape[0] - 1):
        if inner[a] and inner[a + 1] and d2[a] * d2[a + 1] < 0.0:
            count += 1
    return count


# ---------------------------------------------------------------------------
# model factories
# ---------------------------------------------------------------------------


def _penalization(params: dict):
    if not params.get("penalized", True):
        return constant_mu(0.0) if params.get("mode", "imex-i") == "imex-i" else None
    mu = params.get("mu", "auto")
    if mu == "auto":
        return PenalizationConfig()
    return constant_mu(float(mu))


def _build_r13(cfg: ExperimentConfig, n: int, eps: float):
    params = cfg.model_params
    walls = cfg.boundary == "walls"
    grid = Grid1D(cfg.x_left, cfg.x_right, n, GHOST if walls else PERIODIC, ghost=2)
    pen = PenalizationConfig() if params.get("penalized", True) else None
    bc = BC_123 if str(params.get("bc_set", "124")) == "123" else BC_124
    system = r13_system(
        grid,
        eps,
        g=float(params.get("g", 1.0 if walls else 0.0)),
        alpha_bc=float(params.get("alpha", 0.7)),
        beta_bc=float(params.get("beta", 0.3)),
        penalization=pen,
        bc_set=bc,
        ghost_method=params.get("ghost_method", "second_order"),
    )
    if walls:
        state0 = system.steady_compatible_initial_state(float(params.get("c0", 1.0)))
    else:
        x = grid.x()
        u0 = np.sin(np.pi * x) + 0.5 * np.sin(5 * np.pi * x)
        if params.get("prepared", False):
            state0 = system.equilibrium_initial_state(u0)
        else:
            state0 = system.pack(u0, np.zeros(n), np.zeros(n))
    return system, state0


def _build_diffusive2x2(cfg: ExperimentConfig, n: int, eps: float):
    params = cfg.model_params
    grid = Grid1D(cfg.x_left, cfg.x_right, n, PERIODIC, ghost=2)
    system = diffusive2x2_system(
        grid,
        eps,
        mode=params.get("mode", "imex-i"),
        penalization=_penalization(params),
    )
    x = grid.x()
    u0 = np.sin(x)
    state0 = system.pack(u0, np.zeros(n))
    if params.get("prepared", True):
        state0[1, grid.interior] = system.equilibrium_v(state0)
        system.prepare(state0)
    return system, state0


def _build_klf(cfg: ExperimentConfig, n: int, eps: float, penalized=None):
    params = cfg.model_params
    grid = Grid1D(cfg.x_left, cfg.x_right, n, PERIODIC, ghost=2)
    pen = PenalizationConfig() if (params.get("penalized", True) if penalized is None else penalized) else constant_mu(0.0)
    system = klf_system(
        grid,
        eps,
        m=float(params.get("m", 2.0)),
        tol=float(params.get("tol", 1e-6)),
        penalization=pen,
    )
    x = grid.x()
    state0 = system.pack(np.cos(x), np.sin(x))
    return system, state0


def _build_broadwell(cfg: ExperimentConfig, n: int, eps: float):
    params = cfg.model_params
    grid = Grid1D(cfg.x_left, cfg.x_right, n, PERIODIC, ghost=3, node_kind=NODES)
    system = broadwell_system(grid, eps, weno_order=int(params.get("weno_order", 5)))
    state0 = system.smooth_initial_state(float(params.get("amplitude", 0.2)))
    return system, state0


def build_system(cfg: ExperimentConfig, n: int, eps: float):
    if cfg.model == "r13":
        return _build_r13(cfg, n, eps)
    if cfg.model == "diffusive2x2":
        return _build_diffusive2x2(cfg, n, eps)
    if cfg.model == "klf":
        return _build_klf(cfg, n, eps)
    if cfg.model == "broadwell":
        return _build_broadwell(cfg, n, eps)
    if cfg.model == "vdp":
        return vdp_system(eps), vdp_default_state()
    raise ConfigurationError(f"unknown model {cfg.model!r}")


def _heat_exact(cfg: ExperimentConfig, n: int, t: float) -> np.ndarray:
    grid = Grid1D(cfg.x_left, cfg.x_right, n, PERIODIC, ghost=2)
    x = grid.x()
    length = cfg.x_right - cfg.x_left
    k = 2.0 * np.pi / length
    u = math.exp(-k * k * t) * np.sin(k * x)
    v = -k * math.exp(-k * k * t) * np.cos(k * x)
    return np.stack([u, v])


# ---------------------------------------------------------------------------
# studies
# ---------------------------------------------------------------------------


def _run_single(cfg: ExperimentConfig, scheme, n: int, eps: float):
    """One (eps, N) cell; returns (interior solution or None, dt, seconds)."""
    system, state0 = build_system(cfg, n, eps)
    if cfg.model == "vdp":
        dt = cfg.t_end / n  # ladder over step counts for the ODE benchmark
    else:
        dt = cfg.step_dt(system.grid.dx)
    tic = time.perf_counter()
    try:
        traj = integrate(system, scheme, state0, StepControl(t_end=cfg.t_end, dt=dt))
    except RUN_ERRORS:
        return None, dt, time.perf_counter() - tic
    sol = traj.final_state
    if cfg.model == "vdp":
        interior = sol.reshape(2, 1)
    else:
        interior = system.interior(sol).copy()
    return interior, dt, time.perf_counter() - tic


def run_convergence_study(cfg: ExperimentConfig) -> ExperimentReport:
    """Grid-ladder (or step-count ladder) errors and observed orders for
    every eps in the sweep; one CSV row per (eps, pair/grid, component,
    norm).  Aborted cells are recorded as nan with the abort flag and the
    study continues."""
    scheme = get_scheme(cfg.scheme, cfg.registry_path)
    report = ExperimentReport()
    exact = cfg.model_params.get("exact")
    sizes = list(cfg.grid_sizes)
    names = _component_names(cfg)
    for eps in cfg.eps_list:
        sols, dts, secs = {}, {}, {}
        for n in sizes:
            sol, dt, sec = _run_single(cfg, scheme, n, eps)
            sols[n], dts[n], secs[n] = sol, dt, sec
        if exact == "heat":
            errs = {}
            for n in sizes:
                if sols[n] is None:
                    errs[n] = None
                    continue
                ref = _heat_exact(cfg, n, cfg.t_end)
                dx = (cfg.x_right - cfg.x_left) / n
                errs[n] = {
                    norm: np.array(
                        [error_norm(sols[n][k], ref[k], norm, dx) for k in range(len(names))]
                    )
                    for norm in cfg.norms
                }
            _emit_ladder_rows(report, cfg, eps, sizes, sizes, errs, dts, secs, names,
                              ratio=sizes[1] / sizes[0] if len(sizes) > 1 else 1.0)
        else:
            if abs(cfg.ratio - 3.0) > 1e-12:
                raise ConfigurationError("self-convergence studies need a ratio-3 ladder")
            node_kind = NODES if cfg.model == "broadwell" else CELLS
            pair_ns = sizes[1:]
            errs = {}
            for nc, nf in zip(sizes[:-1], sizes[1:]):
                if sols[nc] is None or sols[nf] is None:
                    errs[nf] = None
                    continue
                dx_c = (cfg.x_right - cfg.x_left) / nc if cfg.model != "vdp" else 1.0
                errs[nf] = {
                    norm: self_convergence_errors(sols[nc], sols[nf], norm, dx_c, node_kind)
                    for norm in cfg.norms
                }
            _emit_ladder_rows(report, cfg, eps, pair_ns, sizes, errs, dts, secs, names, ratio=3.0)
    return report


def _component_names(cfg: ExperimentConfig):
    return {
        "r13": ("u", "v", "w"),
        "diffusive2x2": ("u", "v"),
        "klf": ("u", "v"),
        "broadwell": ("rho", "m", "z"),
        "vdp": ("y", "z"),
    }[cfg.model]


def _emit_ladder_rows(report, cfg, eps, row_ns, all_ns, errs, dts, secs, names, ratio):
    prev = {}
    for n in row_ns:
        cell = errs.get(n)
        if cell is None:
            for norm in cfg.norms:
                for name in names:
                    report.add(
                        ReportRow(cfg.model, cfg.scheme, eps, n, dts[n], name, norm,
                                  float("nan"), float("nan"), FLAG_ABORT, secs[n])
                    )
            prev = {}
            continue
        for norm in cfg.norms:
            for k, name in enumerate(names):
                err = float(cell[norm][k])
                order = float("nan")
                flag = ""
                key = (norm, k)
                if key in prev and prev[key] > 0.0 and err > 0.0:
                    order = observed_order(prev[key], err, ratio)
                    if order < cfg.order_floor:
                        flag = FLAG_DEGRADED
                report.add(
                    ReportRow(cfg.model, cfg.scheme, eps, n, dts[n], name, norm, err, order,
                              flag, secs[n])
                )
                prev[key] = err
    return report


def run_steady_state_study(cfg: ExperimentConfig) -> ExperimentReport:
    """R13 wall-bounded relaxation to the analytic steady state.

    Emits per-component final distances, a 'dist' row per step (max norm
    over all components against the steady profile), and a 'steps' row;
    the same with component suffix '_parabolic' for the unpenalized
    parabolic-step reference.  Extras carry the in-memory histories."""
    if cfg.model != "r13" or cfg.boundary != "walls":
        raise ConfigurationError("steady-state study runs the wall-bounded r13 model")
    scheme = get_scheme(cfg.scheme, cfg.registry_path)
    report = ExperimentReport()
    eps = cfg.eps_list[0]
    n = cfg.grid_sizes[-1]
    params = cfg.model_params

    def one(tag: str, penalized: bool, dt: float):
        local = dict(cfg.model_params)
        local["penalized"] = penalized
        cfg_local = _with_params(cfg, local)
        system, state0 = _build_r13(cfg_local, n, eps)
        steady = r13_steady_state(
            system.grid, system.g, system.alpha_bc, system.beta_bc, eps
        )[:, system.grid.interior]
        hist = []

        def cb(step, t, state):
            hist.append((t, float(np.max(np.abs(state[:, system.grid.interior] - steady)))))

        tic = time.perf_counter()
        flag = ""
        samples = []
        try:
            traj = integrate(
                system, scheme, state0, StepControl(t_end=cfg.t_end, dt=dt),
                record="samples", sample_times=[t for t in SNAPSHOT_TIMES if t <= cfg.t_end],
                callback=cb,
            )
            final = traj.final_state[:, system.grid.interior]
            steps = traj.n_steps
            samples = [(t, s[:, system.grid.interior].copy())
                       for t, s in zip(traj.times, traj.states)]
        except RUN_ERRORS as exc:
            final = None
            steps = len(hist)
            flag = FLAG_ABORT
        sec = time.perf_counter() - tic
        for t, d in hist:
            report.add(ReportRow(cfg.model, cfg.scheme, eps, n, dt, "dist" + tag, "linf",
                                 d, float("nan"), flag if final is None else "", sec))
        for k, name in enumerate(("u", "v", "w")):
            err = float("nan") if final is None else float(np.max(np.abs(final[k] - steady[k])))
            report.add(ReportRow(cfg.model, cfg.scheme, eps, n, dt, name + tag, "linf",
                                 err, float("nan"), flag, sec))
        report.add(ReportRow(cfg.model, cfg.scheme, eps, n, dt, "steps" + tag, "count",
                             float(steps), float("nan"), flag, sec))
        report.extras["history" + tag] = hist
        report.extras["steps" + tag] = steps
        report.extras["dt" + tag] = dt
        report.extras["samples" + tag] = samples
        report.extras["x" + tag] = system.grid.x()
        report.extras["steady" + tag] = steady
        return steps

    dx = (cfg.x_right - cfg.x_left) / n
    dt_h = cfg.step_dt(dx)
    steps_h = one("", params.get("penalized", True), dt_h)
    parab_coeff = float(params.get("parabolic_coeff", cfg.dt_coeff if cfg.dt_coeff else 2.5))
    dt_p = parab_coeff * dx * dx
    steps_p = one("_parabolic", False, dt_p)
    report.extras["step_ratio"] = steps_p / steps_h if steps_h else float("nan")
    report.add(ReportRow(cfg.model, cfg.scheme, eps, n, dt_h, "step_ratio", "count",
                         report.extras["step_ratio"], float("nan"), "", 0.0))
    if cfg.profiles_path:
        _write_profiles_csv(cfg.profiles_path, report.extras)
    return report


def _write_profiles_csv(path: str, extras: dict):
    """Companion profile file for the plotting front end:
    x,component,time,value,steady  (one row per cell per snapshot)."""
    x = extras["x"]
    steady = extras["steady"]
    lines = ["x,component,time,value,steady"]
    for t, state in extras["samples"]:
        for k, name in enumerate(("u", "v", "w")):
            for j in range(x.shape[0]):
                lines.append(
                    f"{float(x[j])!r},{name},{float(t)!r},"
                    f"{float(state[k, j])!r},{float(steady[k, j])!r}"
                )
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _with_params(cfg: ExperimentConfig, params: dict) -> ExperimentConfig:
    return dataclasses.replace(cfg, model_params=params)


def run_klf_demo(cfg: ExperimentConfig) -> ExperimentReport:
    """Nonlinear-diffusion stability demonstration.

    Three runs: the explicit-limit scheme (unpenalized, parabolic step) at
    an intermediate time and at t_end, the penalized partitioned scheme at
    a hyperbolic step, and a fine-grid penalized reference.  Rows report
    the oscillation indicator ('osc_*'), step counts ('steps_*') and the
    step ratio."""
    if cfg.model != "klf":
        raise ConfigurationError("klf_demo runs the klf model")
    scheme = get_scheme(cfg.scheme, cfg.registry_path)
    report = ExperimentReport()
    eps = cfg.eps_list[0]
    params = cfg.model_params
    n = cfg.grid_sizes[0]
    n_ref = int(params.get("reference_n", 4 * n))
    t_mid = float(params.get("t_mid", 1.0))
    expl_coeff = float(params.get("explicit_coeff", 0.025))
    hyp_coeff = float(params.get("hyperbolic_coeff", cfg.dt_coeff if cfg.dt_coeff else 0.25))

    def one(tag, n_run, penalized, dt, t_end, store_mid=None):
        system, state0 = _build_klf(cfg, n_run, eps, penalized=penalized)
        tic = time.perf_counter()
        mids = {}

        def cb(step, t, state):
            if store_mid and abs(t - store_mid) < 0.51 * dt and store_mid not in mids:
                mids[store_mid] = system.interior(state)[0].copy()

        flag = ""
        try:
            traj = integrate(system, scheme, state0, StepControl(t_end=t_end, dt=dt), callback=cb)
            u = system.interior(traj.final_state)[0]
            osc = oscillation_indicator(u)
            steps = traj.n_steps
        except RUN_ERRORS:
            u, osc, steps, flag = None, float("nan"), float("nan"), FLAG_ABORT
        sec = time.perf_counter() - tic
        report.add(ReportRow(cfg.model, cfg.scheme, eps, n_run, dt, "osc_" + tag,
                             "oscillations", float(osc), float("nan"), flag, sec))
        report.add(ReportRow(cfg.model, cfg.scheme, eps, n_run, dt, "steps_" + tag, "count",
                             float(steps), float("nan"), flag, sec))
        report.extras["osc_" + tag] = osc
        report.extras["steps_" + tag] = steps
        report.extras["u_" + tag] = u
        if store_mid and store_mid in mids:
            osc_mid = oscillation_indicator(mids[store_mid])
            report.add(ReportRow(cfg.model, cfg.scheme, eps, n_run, dt,
                                 f"osc_{tag}_tmid", "oscillations", float(osc_mid),
                                 float("nan"), "", sec))
            report.extras[f"osc_{tag}_tmid"] = osc_mid
        return steps

    dx = (cfg.x_right - cfg.x_left) / n
    dt_expl = expl_coeff * dx * dx
    dt_hyp = hyp_coeff * dx
    dx_ref = (cfg.x_right - cfg.x_left) / n_ref
    one("reference", n_ref, True, hyp_coeff * dx_ref, cfg.t_end)
    steps_a = one("explicit", n, False, dt_expl, cfg.t_end, store_mid=t_mid)
    steps_b = one("penalized", n, True, dt_hyp, cfg.t_end)
    ratio = steps_a / steps_b if steps_b else float("nan")
    report.extras["step_ratio"] = ratio
    report.add(ReportRow(cfg.model, cfg.scheme, eps, n, dt_hyp, "step_ratio", "count",
                         float(ratio), float("nan"), "", 0.0))
    return report


def run_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    if cfg.experiment == "convergence":
        report = run_convergence_study(cfg)
    elif cfg.experiment == "steady_state":
        report = run_steady_state_study(cfg)
    elif cfg.experiment == "klf_demo":
        report = run_klf_demo(cfg)
    else:
        raise ConfigurationError(f"unknown experiment {cfg.experiment!r}")
    if cfg.output_path:
        report.write_csv(cfg.output_path)
    return report
