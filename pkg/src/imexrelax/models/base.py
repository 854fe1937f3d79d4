"""Split-system contract shared by all models.

A model is immutable configuration plus pure right-hand-side evaluation.
States are plain (ncomp, ntot) float arrays (ghost slots included); grid
models fill their own ghosts inside every evaluation, scalar models ignore
the ghost machinery.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

IMEX_I = "imex-i"
IMEX_E = "imex-e"


@dataclass(frozen=True)
class StageOptions:
    newton_tol: float = 1e-12
    newton_max_iter: int = 50


DEFAULT_STAGE_OPTIONS = StageOptions()


class PenalizationConfig:
    """mu(eps) in [0,1] weighting the added/subtracted diffusion term.

    The default follows exp(-eps^2/dx): ~1 deep in the diffusive regime,
    decaying once eps is no longer small against the mesh, so no term is
    added where it would only degrade accuracy.  mu(0) = 1 always; values
    are clamped to [0,1].
    """

    def __init__(self, mu_of_eps=None):
        self._fn = mu_of_eps

    def mu(self, eps: float, dx: float) -> float:
        if self._fn is None:
            val = math.exp(-(eps * eps) / dx)
        else:
            val = self._fn(eps, dx)
        return min(1.0, max(0.0, float(val)))


def constant_mu(value: float) -> PenalizationConfig:
    return PenalizationConfig(lambda eps, dx: value)


class SplitSystem(ABC):
    """Additive split u' = explicit_rhs + implicit_rhs with a per-stage
    implicit solver.  ``unsplit_rhs`` is an independent evaluation of the
    full semi-discrete right-hand side; the added/subtracted penalization
    terms must cancel against it exactly."""

    epsilon: float
    mode: str = IMEX_I
    component_names: tuple = ()
    is_partitioned: bool = False

    @abstractmethod
    def explicit_rhs(self, state: np.ndarray, t: float) -> np.ndarray: ...

    @abstractmethod
    def implicit_rhs(self, state: np.ndarray, t: float) -> np.ndarray: ...

    @abstractmethod
    def unsplit_rhs(self, state: np.ndarray, t: float) -> np.ndarray: ...

    @abstractmethod
    def stage_solve(
        self, rhs_state: np.ndarray, zdt: float, t: float, opts: StageOptions = DEFAULT_STAGE_OPTIONS
    ) -> np.ndarray:
        """Solve Y = rhs_state + zdt * implicit_rhs(Y); zdt = a_ii * dt."""

    def prepare(self, state: np.ndarray) -> np.ndarray:
        """Fill ghosts / check admissibility, in place.  Returns state."""
        return state

    def algebraic_residual(self, state: np.ndarray) -> np.ndarray:
        raise NotImplementedError(f"{type(self).__name__} exposes no algebraic constraint")

    def max_explicit_speed(self, state: np.ndarray) -> float:
        return 1.0

    def interior(self, state: np.ndarray) -> np.ndarray:
        """View of the physically meaningful entries (used by norms/guards)."""
        return state
