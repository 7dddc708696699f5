"""Exception hierarchy shared by every module of the package."""


class AdtError(Exception):
    """Base class for all errors raised by fbmadt."""

    kind = "adt_error"


class InvalidGridError(AdtError, ValueError):
    kind = "invalid_grid"


class ConditioningError(AdtError, ArithmeticError):
    """Covariance factorization failed even after the jitter ladder."""

    kind = "numerical_conditioning"


class StressDomainError(AdtError, ValueError):
    kind = "stress_domain"


class DataParseError(AdtError, ValueError):
    kind = "parse_error"


class HorizonExceededError(AdtError):
    kind = "horizon_exceeded"


class GridAlignmentError(AdtError, ValueError):
    kind = "grid_alignment"


class UndefinedRelativeErrorError(AdtError, ValueError):
    kind = "undefined_relative_error"


class EstimationError(AdtError):
    kind = "estimation_error"
