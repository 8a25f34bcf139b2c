"""Exception types shared across the library."""


class ParameterError(ValueError):
    """A parameter violates an operation's domain requirements."""


class HypothesisViolation(ParameterError):
    """A named hypothesis on (s, a, beta, gamma) fails for the requested bound."""


class NotInvertibleError(ParameterError):
    """The phase law is not strictly increasing, so it has no usable inverse."""


class OutOfRangeError(ParameterError):
    """Requested value lies outside the invertible range of the phase law."""


class ScanTooSmallError(ParameterError):
    """The scan window does not cover the multiplier's transition region."""


class GridMismatchError(ParameterError):
    """The frequency grid cannot host the requested construction."""


class UndefinedShiftError(ParameterError):
    """t**beta is undefined at t = 0 for beta <= 0."""


class NotApplicableError(ParameterError):
    """The time sequence fails the summability condition the experiment needs."""
