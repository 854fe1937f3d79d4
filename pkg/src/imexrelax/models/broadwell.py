"""Broadwell model: rho_t + m_x = 0, m_t + z_x = 0,
z_t + m_x = (rho^2 + m^2 - 2 rho z)/eps.

Convection is discretized by conservative finite differences with global
Lax-Friedrichs flux splitting and WENO reconstruction and treated
explicitly; the source acts on z only and is linear in z per cell.
"""

from __future__ import annotations

import numpy as np

from ..errors import StateError
from ..spatial import PERIODIC, Grid1D, conservative_divergence, split_flux, weno_reconstruct
from .base import DEFAULT_STAGE_OPTIONS, IMEX_E, SplitSystem

ALPHA_LF = 1.0  # flux Jacobian [[0,1,0],[0,0,1],[0,1,0]] has speeds {0, +-1}


class BroadwellSystem(SplitSystem):
    component_names = ("rho", "m", "z")

    def __init__(self, grid: Grid1D, epsilon: float, weno_order: int = 5):
        if grid.boundary_kind != PERIODIC:
            raise ValueError("Broadwell runs are periodic")
        if epsilon <= 0.0:
            raise ValueError("epsilon must be positive")
        self.grid = grid
        self.epsilon = float(epsilon)
        self.weno_order = weno_order
        self.mode = IMEX_E

    # -- helpers ------------------------------------------------------------
    def prepare(self, state):
        self.grid.wrap_ghosts(state)
        rho = state[0, self.grid.interior]
        if (rho <= 0.0).any():
            raise StateError("nonpositive density")
        return state

    def interior(self, state):
        return state[:, self.grid.interior]

    def _fluxes(self, state):
        rho, m, z = state
        return (m, z, m)

    def _divergence(self, conserved, flux):
        g, dx = self.grid.ghost, self.grid.dx
        fp, fm = split_flux(flux, ALPHA_LF, conserved)
        fhat = weno_reconstruct(fp, g, "left", self.weno_order) + weno_reconstruct(
            fm, g, "right", self.weno_order
        )
        return conservative_divergence(fhat, dx)

    def equilibrium_z(self, rho, m):
        return (rho * rho + m * m) / (2.0 * rho)

    # -- split --------------------------------------------------------------
    def explicit_rhs(self, state, t):
        self.prepare(state)
        out = np.zeros_like(state)
        fluxes = self._fluxes(state)
        for k in range(3):
            out[k, self.grid.interior] = self._divergence(state[k], fluxes[k])
        return out

    def implicit_rhs(self, state, t):
        out = np.zeros_like(state)
        sl = self.grid.interior
        rho, m, z = state[0, sl], state[1, sl], state[2, sl]
        out[2, sl] = (rho * rho + m * m - 2.0 * rho * z) / self.epsilon
        return out

    def unsplit_rhs(self, state, t):
        out = self.explicit_rhs(state, t)
        sl = self.grid.interior
        rho, m, z = state[0, sl], state[1, sl], state[2, sl]
        out[2, sl] += (rho * rho + m * m - 2.0 * rho * z) / self.epsilon
        return out

    def stage_solve(self, rhs_state, zdt, t, opts=DEFAULT_STAGE_OPTIONS):
        out = rhs_state.copy()
        sl = self.grid.interior
        rho, m = out[0, sl], out[1, sl]
        if (rho <= 0.0).any():
            raise StateError("nonpositive density in implicit stage")
        theta = zdt / self.epsilon
        out[2, sl] = (rhs_state[2, sl] + theta * (rho * rho + m * m)) / (1.0 + 2.0 * theta * rho)
        return self.prepare(out)

    def algebraic_residual(self, state):
        sl = self.grid.interior
        rho, m, z = state[0, sl], state[1, sl], state[2, sl]
        return rho * rho + m * m - 2.0 * rho * z

    def max_explicit_speed(self, state):
        return ALPHA_LF

    def smooth_initial_state(self, amplitude: float = 0.2) -> np.ndarray:
        """Well-prepared periodic data: rho = 1 + a sin x, m = 0, z = z*(rho, m)."""
        x = self.grid.x()
        rho = 1.0 + amplitude * np.sin(x)
        m = np.zeros_like(rho)
        state = np.zeros((3, self.grid.ntot))
        sl = self.grid.interior
        state[0, sl] = rho
        state[1, sl] = m
        state[2, sl] = self.equilibrium_z(rho, m)
        return self.prepare(state)


def broadwell_system(grid: Grid1D, epsilon: float, weno_order: int = 5) -> BroadwellSystem:
    return BroadwellSystem(grid, epsilon, weno_order)
