"""Exception types shared across the package."""


class ImexRelaxError(Exception):
    """Base class for all package errors."""


class StructuralTableauError(ImexRelaxError):
    """Tableau arrays are malformed (shape/dimension mismatch)."""


class UnclassifiableTableauError(ImexRelaxError):
    """Implicit tableau matches neither Type A nor Type CK/ARS."""


class RegistryParseError(ImexRelaxError):
    """Scheme registry text could not be parsed; message carries line context."""


class TableauValidationError(ImexRelaxError):
    """A loaded tableau failed structural validation; message lists violations."""


class InsufficientGhostWidth(ImexRelaxError):
    """A stencil asked for more ghost cells than the array provides."""


class SingularTridiagonalError(ImexRelaxError):
    """Zero pivot encountered during a tridiagonal solve."""


class ConfigurationError(ImexRelaxError):
    """Inconsistent model/scheme/experiment configuration."""


class StageSolveError(ImexRelaxError):
    """An implicit stage solve failed (singular stage or Newton breakdown)."""


class StateError(ImexRelaxError):
    """State left the model's admissible set (e.g. nonpositive density)."""


class BlowUpError(ImexRelaxError):
    """Integration produced a non-finite state entry."""

    def __init__(self, time, message=None):
        self.time = time
        super().__init__(message or f"non-finite state at t={time!r}")
