"""Kawashima-LeFloch nonlinear relaxation model
    u_t + v_x = 0
    eps^2 v_t + b(u)_x = -|v|^(m-1) v + q(u)
relaxing (for b(u)=u, q=0) to the nonlinear diffusion u_t = (|u_x|^a u_x)_x
with a = -1 + 1/m.

The model is driven in partitioned form y' = F(y*, y): the first slot is
non-stiff (frozen at the explicit stage reconstruction), the second stiff.
    F_u(y*, y) = -D_x v* - mu * L[u*] + mu * L[u]
    F_v(y*, y) = (-D_x b(u) - |v|^(m-1) v + q(u)) / eps^2
where L is the conservative flux-form diffusion operator with interface
coefficients nu = (|u*_x| + TOL)^a frozen at y* and the trailing u_x live,
so the two L-terms cancel exactly when y* = y.  TOL regularizes |u_x|
wherever it is raised to a negative power.
"""

from __future__ import annotations

import numpy as np

from .. import _kernels
from ..errors import ConfigurationError, StageSolveError
from ..spatial import (
    PERIODIC,
    Grid1D,
    TridiagonalSystem,
    first_derivative,
    solve_tridiagonal,
)
from .base import DEFAULT_STAGE_OPTIONS, IMEX_E, IMEX_I, PenalizationConfig, SplitSystem
from .diffusive2x2 import Closure, identity_closure, zero_closure


def klf_parabolic_cfl(alpha: float, max_ux: float, dx: float) -> float:
    """Explicit-limit step bound dt <= dx^2 / ((1+alpha) |u_x|^alpha).

    Unusable near extrema for alpha < 0: |u_x|^alpha diverges there, so no
    step guarantees stability (the caller must TOL-regularize max_ux).
    """
    if alpha <= -1.0:
        raise ValueError("alpha <= -1: degenerate diffusion coefficient")
    if max_ux < 0.0:
        raise ValueError("max_ux must be nonnegative")
    nu = (1.0 + alpha) * max_ux**alpha
    return dx * dx / nu


class KlfSystem(SplitSystem):
    component_names = ("u", "v")
    is_partitioned = True

    def __init__(
        self,
        grid: Grid1D,
        epsilon: float,
        m: float,
        tol: float = 1e-6,
        penalization: PenalizationConfig | None = None,
        b: Closure | None = None,
        q: Closure | None = None,
        mode: str = IMEX_I,
        upwind_sign: float = 1.0,
    ):
        if grid.boundary_kind != PERIODIC:
            raise ValueError("KLF runs are periodic")
        if epsilon <= 0.0:
            raise ValueError("epsilon must be positive")
        if m <= 0.0:
            raise ValueError("power m must be positive")
        if tol < 0.0:
            raise ValueError("TOL must be nonnegative")
        if mode not in (IMEX_I, IMEX_E):
            raise ConfigurationError(f"unknown mode {mode!r}")
        self.grid = grid
        self.epsilon = float(epsilon)
        self.m = float(m)
        self.alpha = -1.0 + 1.0 / self.m
        self.tol = float(tol)
        self.b = b if b is not None else identity_closure()
        self.q = q if q is not None else zero_closure()
        self.mode = mode
        self.mu = penalization.mu(epsilon, grid.dx) if penalization is not None else 0.0
        self.upwind_sign = upwind_sign

    # -- helpers ------------------------------------------------------------
    def prepare(self, state):
        self.grid.wrap_ghosts(state)
        return state

    def interior(self, state):
        return state[:, self.grid.interior]

    def _interface_nu(self, upad):
        """nu_{j+1/2} = (|u_x| + TOL)^alpha at the n+1 interior interfaces."""
        g, n, dx = self.grid.ghost, self.grid.n, self.grid.dx
        du = (upad[g : g + n + 1] - upad[g - 1 : g + n]) / dx
        if self.alpha == 0.0:
            return np.ones_like(du)
        base = np.abs(du) + (self.tol if self.alpha < 0.0 else 0.0)
        return base**self.alpha

    def _diffusion(self, nu, wpad):
        """Flux-form (nu w_x)_x on the interior from interface coefficients."""
        g, n, dx = self.grid.ghost, self.grid.n, self.grid.dx
        flux = nu * (wpad[g : g + n + 1] - wpad[g - 1 : g + n])
        return np.diff(flux) / dx**2

    def _stiff_v_target(self, upad):
        """q(u) - D_x b(u), the stiff-slot forcing given fresh u."""
        g, dx, sl = self.grid.ghost, self.grid.dx, self.grid.interior
        return self.q(upad[sl]) - first_derivative(self.b(upad), dx, g)

    # -- partitioned form ---------------------------------------------------
    def partitioned_rhs(self, ystar, y, t):
        self.prepare(ystar)
        self.prepare(y)
        g, dx, sl = self.grid.ghost, self.grid.dx, self.grid.interior
        out = np.zeros_like(y)
        nu = self._interface_nu(ystar[0])
        out[0, sl] = (
            -first_derivative(ystar[1], dx, g, "blended", self.upwind_sign, self.mu)
            - self.mu * self._diffusion(nu, ystar[0])
            + self.mu * self._diffusion(nu, y[0])
        )
        v = y[1, sl]
        out[1, sl] = (self._stiff_v_target(y[0]) - np.sign(v) * np.abs(v) ** self.m) / self.epsilon**2
        return out

    def unsplit_rhs(self, state, t):
        """F(y, y): the L-terms cancel, leaving the plain split-free system."""
        self.prepare(state)
        g, dx, sl = self.grid.ghost, self.grid.dx, self.grid.interior
        out = np.zeros_like(state)
        out[0, sl] = -first_derivative(state[1], dx, g, "blended", self.upwind_sign, self.mu)
        v = state[1, sl]
        out[1, sl] = (self._stiff_v_target(state[0]) - np.sign(v) * np.abs(v) ** self.m) / self.epsilon**2
        return out

    # SplitSystem surface: the non-partitioned view freezes y* = y.
    def explicit_rhs(self, state, t):
        out = np.zeros_like(state)
        full = self.partitioned_rhs(state, state, t)
        out[0] = full[0]
        return out

    def implicit_rhs(self, state, t):
        out = np.zeros_like(state)
        full = self.partitioned_rhs(state, state, t)
        out[1] = full[1]
        return out

    def stage_solve(self, rhs_state, zdt, t, opts=DEFAULT_STAGE_OPTIONS):
        raise ConfigurationError("KLF is partitioned; integrate with the partitioned stepper")

    def partitioned_stage_solve(self, ystar, rhs_state, zdt, t, opts=DEFAULT_STAGE_OPTIONS):
        """Solve Y = rhs + zdt * F(ystar, Y): u via a frozen-coefficient
        tridiagonal solve, then v per cell by safeguarded Newton."""
        g, n, dx, sl = self.grid.ghost, self.grid.n, self.grid.dx, self.grid.interior
        self.prepare(ystar)
        out = rhs_state.copy()
        nu = self._interface_nu(ystar[0])
        drift = -first_derivative(
            ystar[1], dx, g, "blended", self.upwind_sign, self.mu
        ) - self.mu * self._diffusion(nu, ystar[0])
        kappa = zdt * self.mu / dx**2
        rhs_u = rhs_state[0, sl] + zdt * drift
        if kappa == 0.0:
            out[0, sl] = rhs_u
        else:
            lower = -kappa * nu[:-1]
            upper = -kappa * nu[1:]
            diag = 1.0 + kappa * (nu[:-1] + nu[1:])
            # cyclic corners: cell 0 couples to cell n-1 through interface 0
            sol = solve_tridiagonal(TridiagonalSystem(lower, diag, upper, rhs_u, cyclic=True))
            out[0, sl] = sol.values
        self.grid.wrap_ghosts(out[0])

        theta = zdt / self.epsilon**2
        r = rhs_state[1, sl] + theta * self._stiff_v_target(out[0])
        v, iters, ok = _kernels.solve_abs_power(
            np.ascontiguousarray(r), theta, self.m, opts.newton_tol, opts.newton_max_iter
        )
        if not ok:
            raise StageSolveError(
                f"stiff source solve did not converge in {opts.newton_max_iter} iterations "
                f"(worst cell used {iters}; m={self.m}, theta={theta:.3e})"
            )
        out[1, sl] = v
        return self.prepare(out)

    def algebraic_residual(self, state):
        self.prepare(state)
        sl = self.grid.interior
        v = state[1, sl]
        return self._stiff_v_target(state[0]) - np.sign(v) * np.abs(v) ** self.m

    def max_explicit_speed(self, state):
        bmax = float(np.max(self.b.d(state[0, self.grid.interior])))
        return max(np.sqrt(max(bmax, 0.0)), 1.0)

    def pack(self, u, v):
        state = np.zeros((2, self.grid.ntot))
        sl = self.grid.interior
        state[0, sl] = u
        state[1, sl] = v
        return self.prepare(state)


def klf_system(
    grid: Grid1D,
    epsilon: float,
    m: float,
    tol: float = 1e-6,
    penalization: PenalizationConfig | None = None,
    mode: str = IMEX_I,
) -> KlfSystem:
    return KlfSystem(grid, epsilon, m, tol, penalization, mode=mode)
