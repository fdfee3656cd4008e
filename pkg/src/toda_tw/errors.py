"""Exception types shared across the package."""

from __future__ import annotations

__all__ = [
    "DivergentWeightError",
    "EvaluationError",
    "IllConditionedError",
    "InvalidStepError",
    "SingularConfigurationError",
    "StiffnessError",
    "UnknownIdentityError",
]


class DivergentWeightError(ValueError):
    """The deformed weight is not integrable on the requested set."""


class EvaluationError(ValueError):
    """An integrand returned NaN or an otherwise unusable value."""


class InvalidStepError(ValueError):
    """A finite-difference step is outside its usable range."""


class IllConditionedError(RuntimeError):
    """A resolvent solve was requested too close to the singular limit.

    Carries the offending determinant value in ``determinant``.
    """

    def __init__(self, message: str, determinant: float):
        super().__init__(message)
        self.determinant = determinant


class StiffnessError(RuntimeError):
    """The ODE integrator failed to advance.

    Carries the last successfully reached abscissa in ``last_a``.
    """

    def __init__(self, message: str, last_a: float):
        super().__init__(message)
        self.last_a = last_a


class SingularConfigurationError(ValueError):
    """Endpoint configuration is degenerate (coincident endpoints)."""


class UnknownIdentityError(ValueError):
    """Requested identity id is not in the catalog."""
