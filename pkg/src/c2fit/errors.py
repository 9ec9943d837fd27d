"""Exception and warning types shared across the package."""


class C2FitError(Exception):
    """Base class for all package errors."""


class DomainError(C2FitError, ValueError):
    """A parameter lies outside the domain of a curve or knot vector."""


class GeometryError(C2FitError):
    """Invalid or unsupported path geometry.

    Args:
        message: Human readable description.
        junction: Index of the offending junction, if any.
    """

    def __init__(self, message: str, junction: int | None = None):
        super().__init__(message)
        self.junction = junction


class RegularityError(GeometryError):
    """The base curve has a vanishing tangent where an offset is requested."""


class ToleranceError(C2FitError):
    """The requested tolerance forces a step below the minimum step size."""


class ParseError(C2FitError, ValueError):
    """A path or spline document does not match its schema."""


class OffsetWarning(UserWarning):
    """An offset curve locally folds over itself (1 - r*kappa <= 0)."""
