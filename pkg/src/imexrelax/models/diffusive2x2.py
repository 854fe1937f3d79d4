"""Diffusive 2x2 relaxation system
    u_t + v_x = 0
    v_t + p(u)_x / eps^2 = -(v - q(u)) / eps^2
with p'(u) > 0, relaxing to u_t + q(u)_x = p(u)_xx as eps -> 0.

Two IMEX splittings:

imex-i  (penalized): the u-equation gains +-mu*p(u)_xx; the explicit slot
        carries -D_x v - mu*D2 p(u), the implicit slot +mu*D2 p(u) and the
        stiff v-equation.  The same 3-point D2 sits in both slots, so the
        added terms cancel exactly and the unsplit right-hand side is
        recovered identically.  The v-equation's p(u)_x is evaluated at the
        stage's fresh u (sequentially implicit), so in the stiff limit the
        scheme is an implicit method for the limit diffusion equation.

imex-e  (additive): the whole hyperbolic part, including p(u)_x/eps^2, is
        explicit; only the source (and the optional penalization term) is
        implicit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigurationError, StateError
from ..spatial import (
    PERIODIC,
    Grid1D,
    TridiagonalSystem,
    first_derivative,
    second_derivative,
    solve_tridiagonal,
)
from .base import DEFAULT_STAGE_OPTIONS, IMEX_E, IMEX_I, PenalizationConfig, SplitSystem


@dataclass(frozen=True)
class Closure:
    fn: object
    deriv: object
    name: str = ""

    def __call__(self, u):
        return self.fn(u)

    def d(self, u):
        return self.deriv(u)


def identity_closure() -> Closure:
    return Closure(lambda u: u, lambda u: np.ones_like(u), "u")


def zero_closure() -> Closure:
    return Closure(lambda u: np.zeros_like(u), lambda u: np.zeros_like(u), "0")


class Diffusive2x2System(SplitSystem):
    component_names = ("u", "v")

    def __init__(
        self,
        grid: Grid1D,
        epsilon: float,
        p: Closure | None = None,
        q: Closure | None = None,
        mode: str = IMEX_I,
        penalization: PenalizationConfig | None = None,
        upwind_sign: float = 1.0,
    ):
        if grid.boundary_kind != PERIODIC:
            raise ValueError("diffusive 2x2 runs are periodic")
        if epsilon <= 0.0:
            raise ValueError("epsilon must be positive")
        if mode not in (IMEX_I, IMEX_E):
            raise ConfigurationError(f"unknown mode {mode!r}")
        if mode == IMEX_I and penalization is None:
            raise ConfigurationError("imex-i requires a penalization config (use constant_mu(0.0) "
                                     "for the unpenalized explicit-limit scheme)")
        self.grid = grid
        self.epsilon = float(epsilon)
        self.p = p if p is not None else identity_closure()
        self.q = q if q is not None else zero_closure()
        self.mode = mode
        self.mu = penalization.mu(epsilon, grid.dx) if penalization is not None else 0.0
        self.upwind_sign = upwind_sign

    # -- helpers ------------------------------------------------------------
    def prepare(self, state):
        self.grid.wrap_ghosts(state)
        if (self.p.d(state[0, self.grid.interior]) <= 0.0).any():
            raise StateError("p'(u) <= 0 on the attained range")
        return state

    def interior(self, state):
        return state[:, self.grid.interior]

    def _dx_blend(self, fpad):
        return first_derivative(
            fpad, self.grid.dx, self.grid.ghost, "blended", self.upwind_sign, self.mu
        )

    # -- split --------------------------------------------------------------
    def explicit_rhs(self, state, t):
        self.prepare(state)
        g, dx, sl = self.grid.ghost, self.grid.dx, self.grid.interior
        out = np.zeros_like(state)
        pu = self.p(state[0])
        out[0, sl] = -self._dx_blend(state[1]) - self.mu * second_derivative(pu, dx, g)
        if self.mode == IMEX_E:
            out[1, sl] = -first_derivative(pu, dx, g) / self.epsilon**2
        return out

    def implicit_rhs(self, state, t):
        self.prepare(state)
        g, dx, sl = self.grid.ghost, self.grid.dx, self.grid.interior
        out = np.zeros_like(state)
        pu = self.p(state[0])
        u = state[0, sl]
        v = state[1, sl]
        out[0, sl] = self.mu * second_derivative(pu, dx, g)
        if self.mode == IMEX_I:
            out[1, sl] = (self.q(u) - first_derivative(pu, dx, g) - v) / self.epsilon**2
        else:
            out[1, sl] = (self.q(u) - v) / self.epsilon**2
        return out

    def unsplit_rhs(self, state, t):
        self.prepare(state)
        g, dx, sl = self.grid.ghost, self.grid.dx, self.grid.interior
        out = np.zeros_like(state)
        pu = self.p(state[0])
        out[0, sl] = -self._dx_blend(state[1])
        out[1, sl] = (
            self.q(state[0, sl]) - first_derivative(pu, dx, g) - state[1, sl]
        ) / self.epsilon**2
        return out

    # -- implicit stage -----------------------------------------------------
    def _solve_u_stage(self, rhs_u, zdt):
        """(I - zdt*mu*D2 o p)(U) = rhs_u with p linearized at rhs_u."""
        g, n, dx, sl = self.grid.ghost, self.grid.n, self.grid.dx, self.grid.interior
        kappa = zdt * self.mu / dx**2
        if kappa == 0.0:
            return rhs_u.copy()
        ustar = self.grid.wrap_ghosts(rhs_u.copy())
        pp = self.p.d(ustar)
        w = self.p(ustar) - pp * ustar  # frozen affine remainder p(U) ~ w + pp*U
        lower = -kappa * np.roll(pp[sl], 1)
        upper = -kappa * np.roll(pp[sl], -1)
        diag = 1.0 + 2.0 * kappa * pp[sl]
        rhs = ustar[sl] + zdt * self.mu * second_derivative(w, dx, g)
        sol = solve_tridiagonal(TridiagonalSystem(lower, diag, upper, rhs, cyclic=True))
        return self.grid.from_interior(sol.values)

    def stage_solve(self, rhs_state, zdt, t, opts=DEFAULT_STAGE_OPTIONS):
        out = rhs_state.copy()
        g, dx, sl = self.grid.ghost, self.grid.dx, self.grid.interior
        out[0] = self._solve_u_stage(rhs_state[0], zdt)
        self.grid.wrap_ghosts(out[0])
        theta = zdt / self.epsilon**2
        pu = self.p(out[0])
        u = out[0, sl]
        if self.mode == IMEX_I:
            target = self.q(u) - first_derivative(pu, dx, g)
        else:
            target = self.q(u)
        out[1, sl] = (rhs_state[1, sl] + theta * target) / (1.0 + theta)
        return self.prepare(out)

    def algebraic_residual(self, state):
        self.prepare(state)
        g, dx, sl = self.grid.ghost, self.grid.dx, self.grid.interior
        pu = self.p(state[0])
        return self.q(state[0, sl]) - first_derivative(pu, dx, g) - state[1, sl]

    def equilibrium_v(self, state):
        """Local-equilibrium v = q(u) - p(u)_x on the grid."""
        self.prepare(state)
        g, dx, sl = self.grid.ghost, self.grid.dx, self.grid.interior
        return self.q(state[0, sl]) - first_derivative(self.p(state[0]), dx, g)

    def max_explicit_speed(self, state):
        pmax = float(np.max(self.p.d(state[0, self.grid.interior])))
        speed = np.sqrt(max(pmax, 0.0))
        if self.mode == IMEX_E:
            return speed / self.epsilon  # the stiff flux really is explicit here
        return max(speed, 1.0)

    def pack(self, u, v):
        state = np.zeros((2, self.grid.ntot))
        sl = self.grid.interior
        state[0, sl] = u
        state[1, sl] = v
        return self.prepare(state)


def diffusive2x2_system(
    grid: Grid1D,
    epsilon: float,
    p: Closure | None = None,
    q: Closure | None = None,
    mode: str = IMEX_I,
    penalization: PenalizationConfig | None = None,
) -> Diffusive2x2System:
    return Diffusive2x2System(grid, epsilon, p, q, mode, penalization)
