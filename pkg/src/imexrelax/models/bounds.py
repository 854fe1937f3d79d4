"""Closed-form stability/admissibility checks for the relaxation models."""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class StabilityBound:
    dt_max: float
    unstable_wavenumber: bool
    note: str = ""


def linear_stability_bound(eps: float, xi: float) -> StabilityBound:
    """Time-step bound xi^2*dt <= (1-4 eps^2 xi^2)/(4 eps^2 xi^2) for the
    penalized first-order pair with mu=1 and central differencing.

    eps=0 returns an unbounded step; 4 eps^2 xi^2 >= 1 means the mode is
    unstable at any step and is flagged as such.
    """
    if xi <= 0.0:
        raise ValueError("wavenumber must be positive")
    if eps < 0.0:
        raise ValueError("eps must be nonnegative")
    if eps == 0.0:
        return StabilityBound(math.inf, False, "no restriction in the zero-relaxation limit")
    q = 4.0 * eps * eps * xi * xi
    dt_max = (1.0 - q) / (q * xi * xi)
    if q >= 1.0:
        return StabilityBound(dt_max, True, "unstable at this wavenumber")
    return StabilityBound(dt_max, False)


def subcharacteristic_check(
    pprime_min: float, coupling_max_abs: float, eps: float | None = None
) -> bool:
    """Hyperbolic scaling (eps=None): p' >= (f')^2.
    Diffusive scaling: |q'|^2 < p'/eps^2."""
    if eps is None:
        return pprime_min >= coupling_max_abs**2
    if eps <= 0.0:
        raise ValueError("diffusive check needs eps > 0")
    return coupling_max_abs**2 < pprime_min / (eps * eps)
