"""Exception types shared across the package."""


class ParameterDomainError(ValueError):
    """A physical parameter is outside its admissible domain."""


class FitError(RuntimeError):
    """A least-squares fit could not be performed (degenerate data)."""


class CalibrationError(RuntimeError):
    """A calibration has no admissible solution."""


class SolverError(RuntimeError):
    """An iterative solve failed to converge.

    Carries the last residual so callers can judge how close it got.
    """

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


class StiffnessError(SolverError):
    """Adaptive integration drove the step size below the feasible floor."""


class AmbiguousRootsError(RuntimeError):
    """More sign changes were found than the physical picture allows.

    ``roots`` holds every crossing located, for diagnostics.
    """

    def __init__(self, message: str, roots=()):
        super().__init__(message)
        self.roots = tuple(roots)


class ConfigError(ValueError):
    """A run configuration failed validation; message names the field."""
