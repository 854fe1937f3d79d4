"""Uniform 1-D grid and discrete operators.

All operators are pure functions over caller-owned arrays.  Arrays carry
ghost layers; populating ghosts (periodic wrap or wall extrapolation) is
the caller's job, the operators never invent boundary data.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import InsufficientGhostWidth, SingularTridiagonalError

CELLS = "cells"
NODES = "nodes"
PERIODIC = "periodic"
GHOST = "ghost"


@dataclass(frozen=True)
class Grid1D:
    """Uniform mesh on [x_left, x_right] with n cells (or nodes)."""

    x_left: float
    x_right: float
    n: int
    boundary_kind: str = PERIODIC
    ghost: int = 3
    node_kind: str = CELLS

    def __post_init__(self):
        if self.n < 4:
            raise ValueError("grid needs n >= 4")
        if self.x_right <= self.x_left:
            raise ValueError("empty domain")
        if self.ghost < 1:
            raise ValueError("ghost width must be >= 1")
        if self.boundary_kind not in (PERIODIC, GHOST):
            raise ValueError(f"unknown boundary kind {self.boundary_kind!r}")
        if self.node_kind not in (CELLS, NODES):
            raise ValueError(f"unknown node kind {self.node_kind!r}")

    @property
    def dx(self) -> float:
        return (self.x_right - self.x_left) / self.n

    @property
    def ntot(self) -> int:
        return self.n + 2 * self.ghost

    @property
    def interior(self) -> slice:
        return slice(self.ghost, self.ghost + self.n)

    def x(self) -> np.ndarray:
        """Interior coordinates (cell centers or nodes)."""
        offset = 0.5 if self.node_kind == CELLS else 0.0
        return self.x_left + (np.arange(self.n) + offset) * self.dx

    def x_padded(self) -> np.ndarray:
        offset = 0.5 if self.node_kind == CELLS else 0.0
        return self.x_left + (np.arange(-self.ghost, self.n + self.ghost) + offset) * self.dx

    def zeros(self) -> np.ndarray:
        return np.zeros(self.ntot)

    def from_interior(self, values) -> np.ndarray:
        out = self.zeros()
        out[self.interior] = values
        return out

    def wrap_ghosts(self, arr: np.ndarray) -> np.ndarray:
        """Fill ghost slots periodically, in place.  Returns arr."""
        g, n = self.ghost, self.n
        arr[..., :g] = arr[..., n : n + g]
        arr[..., g + n :] = arr[..., g : 2 * g]
        return arr


class Field:
    """Grid-aligned value array; entries are checked finite on ingestion."""

    def __init__(self, values, grid: Grid1D):
        values = np.asarray(values, dtype=float)
        if values.shape != (grid.ntot,):
            raise ValueError(
                f"field length {values.shape} does not match grid (n={grid.n}, ghost={grid.ghost})"
            )
        if not np.isfinite(values).all():
            raise ValueError("field contains non-finite entries")
        self.values = values
        self.grid = grid

    @property
    def interior(self) -> np.ndarray:
        return self.values[self.grid.interior]


def required_ghost(order: int, side: str | None = None) -> int:
    if order == 5:
        return 3
    if order == 3:
        return 2
    raise ValueError("WENO order must be 3 or 5")


def weno_reconstruct(f: np.ndarray, ghost: int, side: str, order: int = 5) -> np.ndarray:
    """Interface values f̂ at the n+1 interior interfaces.

    ``side="left"`` gives the limit from the left of each interface (used
    for the positive flux part), ``side="right"`` the limit from the right.
    ``f`` holds n interior values plus ``ghost`` populated layers per side.
    """
    g = ghost
    n = f.shape[0] - 2 * g
    if g < required_ghost(order):
        raise InsufficientGhostWidth(f"WENO{order} needs {required_ghost(order)} ghosts, got {g}")
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    if order == 5:
        if side == "left":
            out = _kernels.weno5_left(f)
            return out[g - 3 : g - 3 + n + 1]
        out = _kernels.weno5_right(f)
        return out[g - 2 : g - 2 + n + 1]
    if side == "left":
        out = _kernels.weno3_left(f)
        return out[g - 2 : g - 2 + n + 1]
    out = _kernels.weno3_right(f)
    return out[g - 1 : g - 1 + n + 1]


def split_flux(f: np.ndarray, alpha: float, u: np.ndarray):
    """Global Lax-Friedrichs splitting f^± = (f ± alpha*u)/2."""
    if alpha <= 0.0 and np.ptp(f) > 0.0:
        raise ValueError("nonpositive wave-speed bound with nonconstant flux")
    fp = 0.5 * (f + alpha * u)
    fm = 0.5 * (f - alpha * u)
    return fp, fm


def conservative_divergence(fhat: np.ndarray, dx: float) -> np.ndarray:
    """-(f̂_{j+1/2} - f̂_{j-1/2})/dx from n+1 interface values."""
    return -np.diff(fhat) / dx


def first_derivative(
    f: np.ndarray,
    dx: float,
    ghost: int,
    mode: str = "central",
    sign: float = 1.0,
    mu: float | None = None,
) -> np.ndarray:
    """First derivative on the interior; central, upwind or blended.

    Blended: D = (1-mu)*upwind + mu*central, mu in [0,1].
    Upwind bias follows ``sign`` (positive wind -> backward difference).
    """
    g = ghost
    if g < 1:
        raise InsufficientGhostWidth("first_derivative needs one ghost layer")
    n = f.shape[0] - 2 * g
    c = f[g : g + n]
    left = f[g - 1 : g + n - 1]
    right = f[g + 1 : g + n + 1]
    central = (right - left) / (2.0 * dx)
    if mode == "central":
        return central
    if sign >= 0.0:
        upwind = (c - left) / dx
    else:
        upwind = (right - c) / dx
    if mode == "upwind":
        return upwind
    if mode == "blended":
        if mu is None or not 0.0 <= mu <= 1.0:
            raise ValueError("blended mode needs mu in [0,1]")
        return (1.0 - mu) * upwind + mu * central
    raise ValueError(f"unknown derivative mode {mode!r}")


def second_derivative(f: np.ndarray, dx: float, ghost: int) -> np.ndarray:
    """Three-point second difference on the interior."""
    g = ghost
    if g < 1:
        raise InsufficientGhostWidth("second_derivative needs one ghost layer")
    n = f.shape[0] - 2 * g
    return (f[g + 1 : g + n + 1] - 2.0 * f[g : g + n] + f[g - 1 : g + n - 1]) / dx**2


@dataclass
class TridiagonalSystem:
    """lower[0] and upper[-1] are the cyclic corner entries when cyclic."""

    lower: np.ndarray
    diag: np.ndarray
    upper: np.ndarray
    rhs: np.ndarray
    cyclic: bool = False


@dataclass
class TridiagonalSolution:
    values: np.ndarray
    residual: float
    rhs_scale: float

    @property
    def within_bound(self) -> bool:
        return self.residual <= 1e-10 * max(self.rhs_scale, 1e-300)


def _apply_tridiagonal(sys: TridiagonalSystem, x: np.ndarray) -> np.ndarray:
    n = x.shape[0]
    out = sys.diag * x
    out[1:] += sys.lower[1:] * x[:-1]
    out[:-1] += sys.upper[:-1] * x[1:]
    if sys.cyclic:
        out[0] += sys.lower[0] * x[n - 1]
        out[n - 1] += sys.upper[n - 1] * x[0]
    return out


def solve_tridiagonal(sys: TridiagonalSystem) -> TridiagonalSolution:
    """Thomas algorithm; cyclic systems via a rank-one correction."""
    lower = np.asarray(sys.lower, dtype=float)
    diag = np.asarray(sys.diag, dtype=float)
    upper = np.asarray(sys.upper, dtype=float)
    rhs = np.asarray(sys.rhs, dtype=float)
    n = diag.shape[0]
    if n < 2:
        raise ValueError("tridiagonal solve needs n >= 2")
    if not sys.cyclic:
        x, status = _kernels.thomas(lower, diag, upper, rhs)
        if status != 0:
            raise SingularTridiagonalError(f"zero pivot at row {status - 1}")
    else:
        if n < 3:
            raise ValueError("cyclic solve needs n >= 3")
        alpha = lower[0]  # A[0, n-1]
        beta = upper[n - 1]  # A[n-1, 0]
        gamma = -diag[0] if diag[0] != 0.0 else 1.0
        dmod = diag.copy()
        dmod[0] = diag[0] - gamma
        dmod[n - 1] = diag[n - 1] - alpha * beta / gamma
        y, status = _kernels.thomas(lower, dmod, upper, rhs)
        if status != 0:
            raise SingularTridiagonalError(f"zero pivot at row {status - 1} (cyclic)")
        u = np.zeros(n)
        u[0] = gamma
        u[n - 1] = beta
        z, status = _kernels.thomas(lower, dmod, upper, u)
        if status != 0:
            raise SingularTridiagonalError(f"zero pivot at row {status - 1} (cyclic)")
        denom = 1.0 + z[0] + (alpha / gamma) * z[n - 1]
        if denom == 0.0 or not np.isfinite(denom):
            raise SingularTridiagonalError("singular rank-one correction")
        factor = (y[0] + (alpha / gamma) * y[n - 1]) / denom
        x = y - factor * z
    residual = float(np.max(np.abs(_apply_tridiagonal(sys, x) - rhs)))
    return TridiagonalSolution(x, residual, float(np.max(np.abs(rhs))) if n else 0.0)
