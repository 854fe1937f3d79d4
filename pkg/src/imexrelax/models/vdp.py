"""Van der Pol oscillator in relaxation form: y' = z, eps z' = (1-y^2) z - y."""

from __future__ import annotations

import numpy as np

from ..errors import StageSolveError
from .base import DEFAULT_STAGE_OPTIONS, IMEX_E, SplitSystem


class VdpSystem(SplitSystem):
    component_names = ("y", "z")

    def __init__(self, epsilon: float):
        if epsilon <= 0.0:
            raise ValueError("epsilon must be positive")
        self.epsilon = float(epsilon)
        self.mode = IMEX_E  # source implicit, trivial "convection" explicit

    def explicit_rhs(self, state, t):
        y, z = state
        return np.array([z, 0.0])

    def implicit_rhs(self, state, t):
        y, z = state
        return np.array([0.0, ((1.0 - y * y) * z - y) / self.epsilon])

    def unsplit_rhs(self, state, t):
        y, z = state
        return np.array([z, ((1.0 - y * y) * z - y) / self.epsilon])

    def stage_solve(self, rhs_state, zdt, t, opts=DEFAULT_STAGE_OPTIONS):
        # y carries no implicit term; z is linear once y is known.
        y = rhs_state[0]
        theta = zdt / self.epsilon
        denom = 1.0 - theta * (1.0 - y * y)
        if denom == 0.0 or not np.isfinite(denom):
            raise StageSolveError(f"singular z-stage: 1 - (a_ii dt/eps)(1-y^2) = {denom!r}")
        z = (rhs_state[1] - theta * y) / denom
        return np.array([y, z])

    def algebraic_residual(self, state):
        y, z = state
        return np.atleast_1d((1.0 - y * y) * z - y)

    def max_explicit_speed(self, state):
        return max(1.0, abs(float(state[1])))


def vdp_system(epsilon: float) -> VdpSystem:
    return VdpSystem(epsilon)


def vdp_manifold_z(y: float) -> float:
    """Leading-order equilibrium z = y/(1-y^2)."""
    return y / (1.0 - y * y)


def vdp_default_state() -> np.ndarray:
    """y(0)=2 with z on the leading-order manifold."""
    return np.array([2.0, vdp_manifold_z(2.0)])
