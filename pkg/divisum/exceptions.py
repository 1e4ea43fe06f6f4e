"""Exception hierarchy shared by every divisum module."""


class DivisumError(Exception):
    """Base class for all divisum errors."""


class DomainError(DivisumError, ValueError):
    """A parameter lies outside the domain of an operation."""


class PoleError(DomainError):
    """The requested value sits on a pole."""


class SingularArgumentError(DomainError):
    """The argument hits a singularity of the function (x = ±1 or x = ∞)."""


class TailBoundError(DomainError):
    """The truncation point is too small for the tail bound to hold."""


class GrowthConditionError(DomainError):
    """A weighting does not decay fast enough to be a multiple of Q."""


class PrecisionError(DivisumError, ArithmeticError):
    """A result cannot be certified at the requested working precision."""


class NotQMultipleError(DivisumError):
    """A weighting differs from Γ·Q at an exact sample point."""


class UnsupportedRegimeError(DivisumError):
    """No evaluation method converges for the requested parameters."""


class ExtrapolationError(DivisumError):
    """The extrapolation fit could not be solved."""

    def __init__(self, message: str, partials: list | None = None):
        super().__init__(message)
        self.partials = partials or []
