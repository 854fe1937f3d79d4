"""IMEX Runge-Kutta stage loop for split systems.

One step of the pair (Atilde, btilde, ctilde | A, b, c):

    Y_i  = y0 + dt Σ_{j<i} ã_ij K̃_j + dt Σ_{j<=i} a_ij K_j
    y1   = y0 + dt Σ_i b̃_i K̃_i + dt Σ_i b_i K_i

K̃_i = explicit_rhs(Y_i), K_i = implicit_rhs(Y_i); the diagonal piece is
handled by the system's stage solver and K_i is recovered from the solved
stage ((Y_i - rhs)/ (a_ii dt)) so stage and update stay exactly consistent.
For globally stiffly accurate pairs the update IS the last stage and is
returned as such, bit for bit.

Partitioned systems y' = F(y*, y) share one K_i = F(Y*_i, Y_i) between an
explicit reconstruction Y*_i and an implicit one Y_i; consistency of the
update requires b = btilde (imex-i) or a globally stiffly accurate pair
(imex-e), which is checked at configuration time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BlowUpError, ConfigurationError, StageSolveError
from .models.base import IMEX_E, IMEX_I, StageOptions
from .tableau import ImexTableau, is_globally_stiffly_accurate, validate


@dataclass(frozen=True)
class StepControl:
    t_end: float
    dt: float | None = None
    hyperbolic_cfl: float | None = None
    parabolic_cfl: float | None = None
    newton_tol: float = 1e-12
    newton_max_iter: int = 50

    def __post_init__(self):
        picked = [x for x in (self.dt, self.hyperbolic_cfl, self.parabolic_cfl) if x is not None]
        if len(picked) != 1:
            raise ConfigurationError("pick exactly one of dt / hyperbolic_cfl / parabolic_cfl")
        if picked[0] <= 0.0:
            raise ConfigurationError("time step / CFL number must be positive")

    def stage_options(self) -> StageOptions:
        return StageOptions(self.newton_tol, self.newton_max_iter)

    def step_size(self, system, state) -> float:
        if self.dt is not None:
            return self.dt
        dx = system.grid.dx
        if self.hyperbolic_cfl is not None:
            return self.hyperbolic_cfl * dx / system.max_explicit_speed(state)
        return self.parabolic_cfl * dx * dx


@dataclass
class Trajectory:
    times: list = field(default_factory=list)
    states: list = field(default_factory=list)
    diagnostics: list = field(default_factory=list)
    n_steps: int = 0

    @property
    def final_state(self):
        return self.states[-1]

    @property
    def final_time(self):
        return self.times[-1]


def _check_tableau(system, t: ImexTableau):
    rep = validate(t)
    if not rep.ok:
        raise ConfigurationError(
            f"tableau {t.name or '?'} failed validation:\n  " + "\n  ".join(rep.violations)
        )
    if system.is_partitioned:
        if system.mode == IMEX_I:
            if float(np.max(np.abs(t.explicit.b - t.implicit.b))) > 1e-12:
                raise ConfigurationError(
                    "partitioned imex-i stepping requires matching weights b = btilde "
                    f"(scheme {t.name or '?'} violates it)"
                )
        elif system.mode == IMEX_E:
            if not is_globally_stiffly_accurate(t):
                raise ConfigurationError(
                    "partitioned imex-e stepping requires a globally stiffly accurate pair "
                    f"(scheme {t.name or '?'} is not)"
                )


def imex_step(system, t: ImexTableau, state, t0: float, dt: float,
              opts: StageOptions = StageOptions(), _gsa: bool | None = None):
    """One IMEX step; returns the new state."""
    Ae, be, ce = t.explicit.A, t.explicit.b, t.explicit.c
    Ai, bi, ci = t.implicit.A, t.implicit.b, t.implicit.c
    s = t.s
    gsa = is_globally_stiffly_accurate(t) if _gsa is None else _gsa
    KE = [None] * s
    KI = [None] * s
    Y = None
    for i in range(s):
        rhs = state.copy()
        for j in range(i):
            if Ae[i, j] != 0.0:
                rhs += (dt * Ae[i, j]) * KE[j]
            if Ai[i, j] != 0.0:
                rhs += (dt * Ai[i, j]) * KI[j]
        zdt = dt * Ai[i, i]
        try:
            Y = system.stage_solve(rhs, zdt, t0 + ci[i] * dt, opts)
        except StageSolveError as exc:
            raise StageSolveError(f"stage {i + 1}/{s} at t={t0:.6g}: {exc}") from exc
        KE[i] = system.explicit_rhs(Y, t0 + ce[i] * dt)
        if zdt != 0.0:
            KI[i] = (Y - rhs) / zdt
        else:
            KI[i] = system.implicit_rhs(Y, t0 + ci[i] * dt)
    if gsa:
        return Y  # update equals the last stage by construction
    out = state.copy()
    for i in range(s):
        if be[i] != 0.0:
            out += (dt * be[i]) * KE[i]
        if bi[i] != 0.0:
            out += (dt * bi[i]) * KI[i]
    return system.prepare(out)


def imex_step_partitioned(system, t: ImexTableau, state, t0: float, dt: float,
                          opts: StageOptions = StageOptions(), _gsa: bool | None = None):
    """One semi-implicit step for y' = F(y*, y); K_i = F(Y*_i, Y_i)."""
    Ae, be, ce = t.explicit.A, t.explicit.b, t.explicit.c
    Ai, bi, ci = t.implicit.A, t.implicit.b, t.implicit.c
    s = t.s
    gsa = is_globally_stiffly_accurate(t) if _gsa is None else _gsa
    K = [None] * s
    Y = None
    for i in range(s):
        ystar = state.copy()
        rhs = state.copy()
        for j in range(i):
            if Ae[i, j] != 0.0:
                ystar += (dt * Ae[i, j]) * K[j]
            if Ai[i, j] != 0.0:
                rhs += (dt * Ai[i, j]) * K[j]
        zdt = dt * Ai[i, i]
        system.prepare(ystar)
        if zdt != 0.0:
            try:
                Y = system.partitioned_stage_solve(ystar, rhs, zdt, t0 + ci[i] * dt, opts)
            except StageSolveError as exc:
                raise StageSolveError(f"stage {i + 1}/{s} at t={t0:.6g}: {exc}") from exc
            K[i] = (Y - rhs) / zdt
        else:
            Y = system.prepare(rhs)
            K[i] = system.partitioned_rhs(ystar, Y, t0 + ci[i] * dt)
    if gsa:
        return Y
    out = state.copy()
    for i in range(s):
        if bi[i] != 0.0:
            out += (dt * bi[i]) * K[i]
    return system.prepare(out)


def manifold_residual(system, state) -> float:
    """Max norm of the discrete algebraic constraint g over the grid."""
    return float(np.max(np.abs(system.algebraic_residual(state.copy()))))


def integrate(
    system,
    tableau: ImexTableau,
    state0,
    control: StepControl,
    record: str = "none",
    sample_times=None,
    callback=None,
) -> Trajectory:
    """March to control.t_end; the final step is clipped to land exactly on
    t_end.  ``record``: 'none' (final only), 'all', or 'samples' (closest
    steps to ``sample_times``).  ``callback(step, t, state)`` runs after
    every step; any non-finite state entry aborts with BlowUpError."""
    _check_tableau(system, tableau)
    gsa = is_globally_stiffly_accurate(tableau)
    opts = control.stage_options()
    step = imex_step_partitioned if system.is_partitioned else imex_step

    state = system.prepare(np.array(state0, dtype=float, copy=True))
    traj = Trajectory()
    pending = sorted(sample_times) if sample_times else []
    t = 0.0
    if record == "all":
        traj.times.append(0.0)
        traj.states.append(state.copy())

    dt_nominal = control.step_size(system, state)
    n_steps = max(1, math.ceil(control.t_end / dt_nominal - 1e-9))
    for k in range(n_steps):
        t_next = min((k + 1) * dt_nominal, control.t_end)
        dt = t_next - t
        # overflow on the way to a detected blow-up is expected; the guard
        # below turns it into a structured abort
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            state = step(system, tableau, state, t, dt, opts, _gsa=gsa)
        t = t_next
        if not np.isfinite(system.interior(state)).all():
            raise BlowUpError(t)
        traj.n_steps += 1
        if callback is not None:
            callback(traj.n_steps, t, state)
        take = record == "all"
        if record == "samples" and pending and t + 0.5 * dt >= pending[0]:
            pending.pop(0)
            take = True
        if take:
            traj.times.append(t)
            traj.states.append(state.copy())
    if record != "all" and (not traj.times or traj.times[-1] != t):
        traj.times.append(t)
        traj.states.append(state)
    return traj
