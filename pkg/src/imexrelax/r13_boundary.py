"""Ghost-cell treatment for the R13 channel problem.

Interior cells are 1..N; each wall owns two ghost layers (cells 0, -1 on
the left, N+1, N+2 on the right).  The fill enforces, at the wall face,

    (1)  w|wall = -g
    (2)  v_x|wall = g
    (4)  u|wall = +-(eps*v -+ beta*w*eps^2)/alpha

via quadratic wall interpolants; set (1),(2),(3) replaces the u-condition
with the flux relation (u_x + eps^2 w_x)|wall = -2 v|wall.  State layout is
(3, ntot) with rows (u, v, w) in the diffusive scaling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ImexRelaxError
from .spatial import Grid1D

LEFT = "left"
RIGHT = "right"

BC_124 = (1, 2, 4)
BC_123 = (1, 2, 3)


@dataclass(frozen=True)
class WallData:
    g: float
    alpha_bc: float
    beta_bc: float
    eps: float
    dx: float
    side: str

    def __post_init__(self):
        if not self.alpha_bc > self.beta_bc > 0.0:
            raise ValueError("wall coefficients need alpha > beta > 0")
        if self.side not in (LEFT, RIGHT):
            raise ValueError(f"side must be 'left' or 'right', got {self.side!r}")


def _check_grid(grid: Grid1D):
    if grid.ghost < 2:
        raise ImexRelaxError("R13 walls need two ghost layers")
    if grid.n < 3:
        raise ImexRelaxError("need at least 3 interior cells per side")


def _wall_interp(f0, f1, f2):
    """Quadratic interpolant at the wall face from cells 0, 1, 2 (exact for
    quadratics; inverse of the 8/-6/1 ghost formula)."""
    return 0.375 * f0 + 0.75 * f1 - 0.125 * f2


def wall_u_value(wall: WallData, v_wall: float, w_wall: float) -> float:
    """Condition (4) solved for u at the wall face."""
    if wall.side == LEFT:
        return -wall.eps * (v_wall + wall.eps * wall.beta_bc * w_wall) / wall.alpha_bc
    return wall.eps * (v_wall - wall.eps * wall.beta_bc * w_wall) / wall.alpha_bc


def apply_ghost_second_order(state: np.ndarray, grid: Grid1D, wall: WallData, bc_set=BC_124):
    """Fill both ghost layers on one side from the interior; idempotent."""
    _check_grid(grid)
    if tuple(bc_set) not in (BC_124, BC_123):
        raise ValueError(f"boundary set must be (1,2,4) or (1,2,3), got {bc_set}")
    g = wall.g
    gh = grid.ghost
    u, v, w = state
    if wall.side == LEFT:
        i1, i2, i3 = gh, gh + 1, gh + 2
        g0, g1 = gh - 1, gh - 2  # ghost layers: cell 0, cell -1
        sgn = 1.0
    else:
        i1, i2, i3 = gh + grid.n - 1, gh + grid.n - 2, gh + grid.n - 3
        g0, g1 = gh + grid.n, gh + grid.n + 1
        sgn = -1.0

    w_wall = -g
    w[g0] = (8.0 * w_wall - 6.0 * w[i1] + w[i2]) / 3.0
    v[g0] = v[i1] - sgn * g * wall.dx
    v_wall = _wall_interp(v[g0], v[i1], v[i2])
    if tuple(bc_set) == BC_124:
        u_wall = wall_u_value(wall, v_wall, w_wall)
        u[g0] = (8.0 * u_wall - 6.0 * u[i1] + u[i2]) / 3.0
    else:
        # (3): (u_x + eps^2 w_x)|wall = -2 v|wall with two-point wall slopes
        u[g0] = u[i1] + sgn * (wall.eps**2 * (w[i1] - w[g0]) + 2.0 * wall.dx * v_wall)
    for row in (u, v, w):
        row[g1] = 3.0 * row[g0] - 3.0 * row[i1] + row[i2]
    return state


def u_ghost_affine(state: np.ndarray, grid: Grid1D, wall: WallData, bc_set=BC_124):
    """Coefficients (e0, e1, e2) with u_ghost = e0 + e1*u_first + e2*u_second,
    evaluated from the state's frozen v (and w) rows.  Used to embed the
    ghost extrapolation into implicit-stage tridiagonal rows."""
    _check_grid(grid)
    gh = grid.ghost
    _, v, w = state
    if wall.side == LEFT:
        i1, i2 = gh, gh + 1
        sgn = 1.0
    else:
        i1, i2 = gh + grid.n - 1, gh + grid.n - 2
        sgn = -1.0
    v0 = v[i1] - sgn * wall.g * wall.dx
    v_wall = _wall_interp(v0, v[i1], v[i2])
    w_wall = -wall.g
    if tuple(bc_set) == BC_124:
        u_wall = wall_u_value(wall, v_wall, w_wall)
        return (8.0 / 3.0) * u_wall, -2.0, 1.0 / 3.0
    w0 = (8.0 * w_wall - 6.0 * w[i1] + w[i2]) / 3.0
    e0 = sgn * (wall.eps**2 * (w[i1] - w0) + 2.0 * wall.dx * v_wall)
    return e0, 1.0, 0.0


def _lagrange_values(xs: np.ndarray, x: float):
    """ell_i(x) and ell_i'(x) for the Lagrange basis on nodes xs."""
    npts = xs.shape[0]
    ell = np.ones(npts)
    dell = np.zeros(npts)
    for i in range(npts):
        for j in range(npts):
            if j == i:
                continue
            ell[i] *= (x - xs[j]) / (xs[i] - xs[j])
        for k in range(npts):
            if k == i:
                continue
            term = 1.0 / (xs[i] - xs[k])
            for j in range(npts):
                if j in (i, k):
                    continue
                term *= (x - xs[j]) / (xs[i] - xs[j])
            dell[i] += term
    return ell, dell


def apply_ghost_lagrange(state: np.ndarray, grid: Grid1D, wall: WallData, n: int, bc_set=BC_124):
    """Degree-n constrained Lagrange extrapolation: the first ghost value of
    each row is solved from the wall condition, outer ghosts are evaluated
    from the interpolant."""
    _check_grid(grid)
    if tuple(bc_set) != BC_124:
        raise ValueError("Lagrange fill implements boundary set (1,2,4)")
    if n < 1 or n > grid.n:
        raise ValueError(f"need 1 <= n <= {grid.n} interior points, got {n}")
    gh = grid.ghost
    xpad = grid.x_padded()
    u, v, w = state
    if wall.side == LEFT:
        ghost0 = gh - 1
        interior = np.arange(gh, gh + n)
        outer = np.arange(gh - 2, gh - grid.ghost - 1, -1)
        x_wall = grid.x_left
    else:
        ghost0 = gh + grid.n
        interior = np.arange(gh + grid.n - 1, gh + grid.n - 1 - n, -1)
        outer = np.arange(gh + grid.n + 1, gh + grid.n + grid.ghost)
        x_wall = grid.x_right
    nodes = np.concatenate(([ghost0], interior))
    xs = xpad[nodes]
    ell, dell = _lagrange_values(xs, x_wall)
    if abs(ell[0]) < 1e-12 or abs(dell[0]) < 1e-12 / wall.dx:
        raise ImexRelaxError("degenerate stencil: wall basis value/derivative vanishes")

    w[ghost0] = (-wall.g - w[interior] @ ell[1:]) / ell[0]
    v[ghost0] = (wall.g - v[interior] @ dell[1:]) / dell[0]
    v_wall = v[nodes] @ ell
    w_wall = w[nodes] @ ell
    u_wall = wall_u_value(wall, v_wall, w_wall)
    u[ghost0] = (u_wall - u[interior] @ ell[1:]) / ell[0]
    for k in outer:
        ek, _ = _lagrange_values(xs, xpad[k])
        for row in (u, v, w):
            row[k] = row[nodes] @ ek
    return state


def wall_residuals(state: np.ndarray, grid: Grid1D, wall: WallData):
    """Discrete residuals (r1, r2, r4) of the wall conditions, evaluated with
    the same interpolants the second-order ghost fill enforces."""
    _check_grid(grid)
    gh = grid.ghost
    u, v, w = state
    if wall.side == LEFT:
        g0, i1, i2 = gh - 1, gh, gh + 1
        sgn = 1.0
    else:
        g0, i1, i2 = gh + grid.n, gh + grid.n - 1, gh + grid.n - 2
        sgn = -1.0
    w_wall = _wall_interp(w[g0], w[i1], w[i2])
    v_wall = _wall_interp(v[g0], v[i1], v[i2])
    u_wall = _wall_interp(u[g0], u[i1], u[i2])
    r1 = w_wall + wall.g
    r2 = sgn * (v[i1] - v[g0]) / wall.dx - wall.g
    r4 = u_wall - wall_u_value(wall, v_wall, w_wall)
    return r1, r2, r4
