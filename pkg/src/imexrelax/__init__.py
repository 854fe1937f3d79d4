"""imexrelax: IMEX Runge-Kutta solvers for 1-D hyperbolic systems with
stiff and diffusive relaxation, plus the experiment harness around them."""

from . import errors, harness, integrator, models, r13_boundary, spatial, tableau
from ._kernels import USING_NUMBA

__all__ = [
    "errors",
    "harness",
    "integrator",
    "models",
    "r13_boundary",
    "spatial",
    "tableau",
    "USING_NUMBA",
]

__version__ = "0.1.0"
