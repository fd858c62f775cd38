"""Exception types.

Two families matter to callers: ``ValidationError`` (bad inputs, checked
before any numerics run) and ``NumericalBudgetError`` (a computation could
not reach its declared accuracy). The CLI maps them to exit codes 64 and 2.
"""

from __future__ import annotations


class MIndetError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(MIndetError, ValueError):
    """Inputs violate a documented precondition."""


class OverlapError(ValidationError):
    """Seed supports intersect on a set of positive measure."""

    def __init__(self, message: str, overlap: float):
        super().__init__(message)
        self.overlap = overlap


class DomainError(ValidationError):
    """An argument lies outside the domain of the requested operation."""


class ShapeError(ValidationError):
    """A state does not have the structure an operation requires."""


class GridMismatchError(ValidationError):
    """Two sampled objects live on different r-grids."""


class NumericalBudgetError(MIndetError):
    """A numerical result could not be certified at the requested tolerance."""


class FitError(NumericalBudgetError):
    """Chebyshev fit did not converge at the maximum degree."""


class ResolutionError(NumericalBudgetError):
    """A (differentiated) Chebyshev series is no longer resolved."""


class DerivativeBudgetError(NumericalBudgetError):
    """Requested derivative or moment order exceeds the configured maximum."""


class QuadratureError(NumericalBudgetError):
    """Adaptive quadrature failed to converge."""

    def __init__(self, message: str, worst_interval: tuple[float, float], error: float):
        super().__init__(message)
        self.worst_interval = worst_interval
        self.error = error


class TailBudgetError(NumericalBudgetError):
    """Truncated r-grid tail makes a moment untrustworthy."""


class TruncationBudgetError(NumericalBudgetError):
    """A discrete expansion captured too little probability mass."""


class SelfAdjointnessError(NumericalBudgetError):
    """An expectation of a self-adjoint operator came out with a large imaginary part."""
