"""Exception hierarchy.

Two branches matter for callers: ``ValidationError`` covers bad inputs and
parameter-domain violations, ``NumericalError`` covers honest numerical
failures (unreachable tolerance, divergent tails).  The CLI maps them to
exit codes 2 and 3 respectively.
"""


class BoxSqueezeError(Exception):
    """Base class for all library errors."""


class ValidationError(BoxSqueezeError, ValueError):
    """Invalid input or parameter outside its admissible domain."""


class NumericalError(BoxSqueezeError, ArithmeticError):
    """A computation could not be completed to the requested accuracy."""


# --- validation ------------------------------------------------------------

class ZeroSeries(ValidationError):
    """All spectral coefficients vanish; nothing to normalize."""


class OutOfDomain(ValidationError):
    """Position argument outside the interval [-l, l]."""


class InvalidTau(ValidationError):
    """Theta-function modulus must satisfy tau > 0."""


class InvalidGamma(ValidationError):
    """Gaussian tail exponent must satisfy gamma > 0."""


class EpsilonTooLarge(ValidationError):
    """Mollifier width incompatible with the interval (3*eps >= l)."""


class TargetTooCloseToWall(ValidationError):
    """|x*| >= l - 3*eps leaves no room for the cutoff plateau."""


class DensityNotEven(ValidationError):
    """Momentum density failed the sampled evenness certificate."""


class DensityNotMonotone(ValidationError):
    """Momentum density failed the sampled non-increase certificate."""


class InfiniteSecondMoment(ValidationError):
    """Momentum density has no finite second moment."""


class NotMonotone(ValidationError):
    """Cosine-sum coefficient sequence is not non-increasing."""


class AtSingularity(ValidationError):
    """Cosine-sum bound evaluated at x = 2*pi*n where it degenerates."""


class NotInDomain(ValidationError):
    """State has no analytic derivatives; derivative quadrature unavailable."""


# --- numerical -------------------------------------------------------------

class NoFiniteTail(NumericalError):
    """Certified weighted coefficient tail cannot be brought below tolerance.

    For momentum work this signals an infinite-dispersion state; for energy
    work it signals an infinite-energy-class state.
    """


class QuadratureFailure(NumericalError):
    """Adaptive quadrature exhausted its budget above the error target."""


class NonSummable(NumericalError):
    """sum |a_k| (including the certified tail) diverges; no uniform limit."""


class BoundViolation(NumericalError):
    """A mathematically proven bound was violated beyond numerical slack."""
