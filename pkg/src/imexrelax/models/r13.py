"""R13 channel model (Poiseuille-flow reduction) in the diffusive scaling:

    u_t + v_x                          = g
    v_t + (u_x/eps^2 + w_x)/2          = -v/eps^2
    w_t + v_x/eps^2                    = -w/eps^2

(u, v, w) = scaled velocity, shear stress, scaled parallel heat flux.  The
penalized split adds and subtracts mu*u_xx/2 in the u-equation:

    explicit: (-v_x - mu*u_xx/2,  -w_x/2,        0)
    implicit: (mu*u_xx/2 + g,  -u_x/(2 eps^2) - v/eps^2,  -v_x/eps^2 - w/eps^2)

Both slots use the same 3-point second difference, so their sum is exactly
the unpenalized right-hand side.  Implicit stages are solved sequentially:
u by a (wall-aware) tridiagonal solve, then v pointwise with the fresh u_x,
then w pointwise with the fresh v_x.
"""

from __future__ import annotations

import numpy as np

from ..errors import ConfigurationError
from ..r13_boundary import (
    BC_124,
    LEFT,
    RIGHT,
    WallData,
    apply_ghost_lagrange,
    apply_ghost_second_order,
    u_ghost_affine,
)
from ..spatial import (
    GHOST,
    PERIODIC,
    Grid1D,
    TridiagonalSystem,
    first_derivative,
    second_derivative,
    solve_tridiagonal,
)
from .base import DEFAULT_STAGE_OPTIONS, IMEX_I, PenalizationConfig, SplitSystem


class R13System(SplitSystem):
    component_names = ("u", "v", "w")

    def __init__(
        self,
        grid: Grid1D,
        epsilon: float,
        g: float,
        alpha_bc: float = 0.7,
        beta_bc: float = 0.3,
        penalization: PenalizationConfig | None = None,
        bc_set=BC_124,
        ghost_method: str = "second_order",
        lagrange_degree: int = 2,
    ):
        if epsilon <= 0.0:
            raise ValueError("epsilon must be positive")
        if grid.boundary_kind == GHOST and grid.ghost < 2:
            raise ValueError("wall-bounded R13 needs two ghost layers")
        if ghost_method not in ("second_order", "lagrange"):
            raise ConfigurationError(f"unknown ghost method {ghost_method!r}")
        self.grid = grid
        self.epsilon = float(epsilon)
        self.g = float(g)
        self.alpha_bc = float(alpha_bc)
        self.beta_bc = float(beta_bc)
        self.mode = IMEX_I
        self.mu = penalization.mu(epsilon, grid.dx) if penalization is not None else 0.0
        self.bc_set = tuple(bc_set)
        self.ghost_method = ghost_method
        self.lagrange_degree = lagrange_degree
        if grid.boundary_kind == GHOST:
            self.wall_left = WallData(self.g, self.alpha_bc, self.beta_bc, self.epsilon, grid.dx, LEFT)
            self.wall_right = WallData(self.g, self.alpha_bc, self.beta_bc, self.epsilon, grid.dx, RIGHT)
            if ghost_method == "lagrange" and self.mu > 0.0 and lagrange_degree > 2:
                raise ConfigurationError(
                    "implicit-stage rows stay tridiagonal only for lagrange degree <= 2"
                )
        else:
            self.wall_left = self.wall_right = None

    # -- ghosts ---------------------------------------------------------------
    def prepare(self, state):
        if self.grid.boundary_kind == PERIODIC:
            self.grid.wrap_ghosts(state)
        elif self.ghost_method == "second_order":
            apply_ghost_second_order(state, self.grid, self.wall_left, self.bc_set)
            apply_ghost_second_order(state, self.grid, self.wall_right, self.bc_set)
        else:
            apply_ghost_lagrange(state, self.grid, self.wall_left, self.lagrange_degree, self.bc_set)
            apply_ghost_lagrange(state, self.grid, self.wall_right, self.lagrange_degree, self.bc_set)
        return state

    def interior(self, state):
        return state[:, self.grid.interior]

    # -- split ----------------------------------------------------------------
    def explicit_rhs(self, state, t):
        self.prepare(state)
        g, dx, sl = self.grid.ghost, self.grid.dx, self.grid.interior
        out = np.zeros_like(state)
        out[0, sl] = -first_derivative(state[1], dx, g) - 0.5 * self.mu * second_derivative(
            state[0], dx, g
        )
        return out

    def implicit_rhs(self, state, t):
        # The w-flux sits in the implicit slot together with the relaxation:
        # with central differencing and a hyperbolic step the explicitly
        # treated w_x/2 drives an instability of the half-resolved stiff
        # (v,w) waves (their physical damping is lost); the coupled implicit
        # treatment below restores it and is unconditionally von-Neumann
        # stable for this split.
        self.prepare(state)
        g, dx, sl = self.grid.ghost, self.grid.dx, self.grid.interior
        eps2 = self.epsilon**2
        out = np.zeros_like(state)
        out[0, sl] = 0.5 * self.mu * second_derivative(state[0], dx, g) + self.g
        out[1, sl] = (
            -0.5 * first_derivative(state[2], dx, g)
            - 0.5 * first_derivative(state[0], dx, g) / eps2
            - state[1, sl] / eps2
        )
        out[2, sl] = -first_derivative(state[1], dx, g) / eps2 - state[2, sl] / eps2
        return out

    def unsplit_rhs(self, state, t):
        self.prepare(state)
        g, dx, sl = self.grid.ghost, self.grid.dx, self.grid.interior
        eps2 = self.epsilon**2
        out = np.zeros_like(state)
        out[0, sl] = -first_derivative(state[1], dx, g) + self.g
        out[1, sl] = (
            -0.5 * first_derivative(state[2], dx, g)
            - 0.5 * first_derivative(state[0], dx, g) / eps2
            - state[1, sl] / eps2
        )
        out[2, sl] = -first_derivative(state[1], dx, g) / eps2 - state[2, sl] / eps2
        return out

    # -- sequential implicit stage ---------------------------------------------
    def _solve_u_stage(self, rhs_state, zdt):
        """u = rhs_u + zdt*(mu*u_xx/2 + g); wall rows embed the ghost
        extrapolation weights computed from the frozen v (and w)."""
        grid = self.grid
        sl, dx, n = grid.interior, grid.dx, grid.n
        kappa = zdt * self.mu / (2.0 * dx * dx)
        rhs = rhs_state[0, sl] + zdt * self.g
        if kappa == 0.0:
            return rhs
        lower = np.full(n, -kappa)
        diag = np.full(n, 1.0 + 2.0 * kappa)
        upper = np.full(n, -kappa)
        rhs = rhs.copy()
        if grid.boundary_kind == PERIODIC:
            sol = solve_tridiagonal(TridiagonalSystem(lower, diag, upper, rhs, cyclic=True))
            return sol.values
        e0, e1, e2 = u_ghost_affine(rhs_state, grid, self.wall_left, self.bc_set)
        diag[0] = 1.0 + kappa * (2.0 - e1)
        upper[0] = -kappa * (1.0 + e2)
        rhs[0] += kappa * e0
        e0, e1, e2 = u_ghost_affine(rhs_state, grid, self.wall_right, self.bc_set)
        diag[-1] = 1.0 + kappa * (2.0 - e1)
        lower[-1] = -kappa * (1.0 + e2)
        rhs[-1] += kappa * e0
        sol = solve_tridiagonal(TridiagonalSystem(lower, diag, upper, rhs, cyclic=False))
        return sol.values

    def _fill_row_ghosts(self, out, rhs_state):
        """Ghosts for a partially updated stage state: u ghosts consistent
        with the frozen-v wall data used by the tridiagonal rows."""
        grid = self.grid
        if grid.boundary_kind == PERIODIC:
            for row in out:
                grid.wrap_ghosts(row)
            return
        work = out.copy()
        work[1] = rhs_state[1]
        work[2] = rhs_state[2]
        self.prepare(work)
        out[0] = work[0]

    def _fill_v_ghosts(self, row):
        grid, gh, dx = self.grid, self.grid.ghost, self.grid.dx
        i1, i2 = gh, gh + 1
        row[gh - 1] = row[i1] - self.g * dx
        row[gh - 2] = 3.0 * row[gh - 1] - 3.0 * row[i1] + row[i2]
        j1, j2 = gh + grid.n - 1, gh + grid.n - 2
        row[gh + grid.n] = row[j1] + self.g * dx
        row[gh + grid.n + 1] = 3.0 * row[gh + grid.n] - 3.0 * row[j1] + row[j2]

    def _fill_w_ghosts(self, row):
        grid, gh = self.grid, self.grid.ghost
        i1, i2 = gh, gh + 1
        row[gh - 1] = (-8.0 * self.g - 6.0 * row[i1] + row[i2]) / 3.0
        row[gh - 2] = 3.0 * row[gh - 1] - 3.0 * row[i1] + row[i2]
        j1, j2 = gh + grid.n - 1, gh + grid.n - 2
        row[gh + grid.n] = (-8.0 * self.g - 6.0 * row[j1] + row[j2]) / 3.0
        row[gh + grid.n + 1] = 3.0 * row[gh + grid.n] - 3.0 * row[j1] + row[j2]

    def _solve_v_stage(self, rhs_state, zdt, du):
        """Eliminate w from the coupled (v,w) stage:
            (1+th) V - beta D2 V = rhs_v - (th/2) u_x - zdt/(2(1+th)) D_x rhs_w
        with beta = zdt*th/(2(1+th)); then w follows pointwise."""
        grid = self.grid
        sl, dx, n, gh = grid.interior, grid.dx, grid.n, grid.ghost
        theta = zdt / self.epsilon**2
        beta = zdt * theta / (2.0 * (1.0 + theta))
        rw = rhs_state[2].copy()
        if grid.boundary_kind == PERIODIC:
            grid.wrap_ghosts(rw)
        else:
            self._fill_w_ghosts(rw)
        rhs = rhs_state[1, sl] - 0.5 * theta * du - (zdt / (2.0 * (1.0 + theta))) * first_derivative(
            rw, dx, gh
        )
        kb = beta / dx**2
        lower = np.full(n, -kb)
        diag = np.full(n, 1.0 + theta + 2.0 * kb)
        upper = np.full(n, -kb)
        if grid.boundary_kind == PERIODIC:
            sol = solve_tridiagonal(TridiagonalSystem(lower, diag, upper, rhs, cyclic=True))
            return sol.values
        # ghost relations v_0 = v_1 -+ g dx fold into the wall rows
        rhs = rhs.copy()
        diag[0] = 1.0 + theta + kb
        rhs[0] -= kb * self.g * dx
        diag[-1] = 1.0 + theta + kb
        rhs[-1] += kb * self.g * dx
        sol = solve_tridiagonal(TridiagonalSystem(lower, diag, upper, rhs, cyclic=False))
        return sol.values

    def stage_solve(self, rhs_state, zdt, t, opts=DEFAULT_STAGE_OPTIONS):
        grid = self.grid
        sl, dx, gh = grid.interior, grid.dx, grid.ghost
        out = rhs_state.copy()
        if zdt == 0.0:
            return self.prepare(out)
        theta = zdt / self.epsilon**2

        out[0, sl] = self._solve_u_stage(rhs_state, zdt)
        if grid.boundary_kind == PERIODIC:
            grid.wrap_ghosts(out[0])
        else:
            self._fill_row_ghosts(out, rhs_state)
        du = first_derivative(out[0], dx, gh)
        out[1, sl] = self._solve_v_stage(rhs_state, zdt, du)

        if grid.boundary_kind == PERIODIC:
            grid.wrap_ghosts(out[1])
        else:
            self._fill_v_ghosts(out[1])
        dv = first_derivative(out[1], dx, gh)
        out[2, sl] = (rhs_state[2, sl] - theta * dv) / (1.0 + theta)
        return self.prepare(out)

    # -- diagnostics ------------------------------------------------------------
    def algebraic_residual(self, state):
        """Stiff-limit relations v = -u_x/2 and w = -v_x."""
        self.prepare(state)
        g, dx, sl = self.grid.ghost, self.grid.dx, self.grid.interior
        rv = state[1, sl] + 0.5 * first_derivative(state[0], dx, g)
        rw = state[2, sl] + first_derivative(state[1], dx, g)
        return np.concatenate([rv, rw])

    def max_explicit_speed(self, state):
        return 1.0

    def pack(self, u, v, w):
        state = np.zeros((3, self.grid.ntot))
        sl = self.grid.interior
        state[0, sl] = u
        state[1, sl] = v
        state[2, sl] = w
        return self.prepare(state)

    def equilibrium_initial_state(self, u0) -> np.ndarray:
        """Well-prepared data on the stiff-limit manifold: v = -u_x/2,
        w = -v_x (discrete central derivatives), avoiding an initial layer."""
        g, dx, sl = self.grid.ghost, self.grid.dx, self.grid.interior
        state = self.pack(u0, np.zeros(self.grid.n), np.zeros(self.grid.n))
        state[1, sl] = -0.5 * first_derivative(state[0], dx, g)
        self.prepare(state)
        state[2, sl] = -first_derivative(state[1], dx, g)
        return self.prepare(state)

    def steady_compatible_initial_state(self, c0: float = 1.0) -> np.ndarray:
        """Start data u0 = (eps/alpha)((C + beta*eps)x - g), v0 = gx + C,
        w0 = -x^2 for the steady-state convergence runs."""
        x = self.grid.x()
        eps, a, b, g = self.epsilon, self.alpha_bc, self.beta_bc, self.g
        u0 = (eps / a) * ((c0 + b * eps) * x - g)
        v0 = g * x + c0
        w0 = -(x**2)
        return self.pack(u0, v0, w0)


def r13_system(
    grid: Grid1D,
    epsilon: float,
    g: float,
    alpha_bc: float = 0.7,
    beta_bc: float = 0.3,
    penalization: PenalizationConfig | None = None,
    bc_set=BC_124,
    ghost_method: str = "second_order",
) -> R13System:
    return R13System(grid, epsilon, g, alpha_bc, beta_bc, penalization, bc_set, ghost_method)


def r13_steady_profile(x, g: float, alpha_bc: float, beta_bc: float, eps: float):
    """Scaled steady state at arbitrary points:
    u = eps*g*(1+eps*beta)/alpha + g*(1-x^2), v = g*x, w = -g."""
    x = np.asarray(x, dtype=float)
    u = eps * g * (1.0 + eps * beta_bc) / alpha_bc + g * (1.0 - x * x)
    v = g * x
    w = np.full_like(x, -g)
    return u, v, w


def r13_steady_state(grid: Grid1D, g: float, alpha_bc: float, beta_bc: float, eps: float) -> np.ndarray:
    """Scaled steady state sampled on the padded grid (ghosts included)."""
    u, v, w = r13_steady_profile(grid.x_padded(), g, alpha_bc, beta_bc, eps)
    return np.stack([u, v, w])
