"""Exception hierarchy shared by every module."""


class QDualityError(ValueError):
    """Base class for all errors raised by this package."""


class NotHermitian(QDualityError):
    pass


class DimensionMismatch(QDualityError):
    pass


class BadDimension(QDualityError):
    pass


class DomainError(QDualityError):
    """A spectral function is undefined on (a clamped) eigenvalue."""


class ConvergenceError(QDualityError):
    pass


class BadProbabilityVector(QDualityError):
    pass


class OutOfRange(QDualityError):
    """A Bloch vector maps to populations outside [0, 1]."""


class InvalidState(QDualityError):
    """Base for the density-matrix validation failures."""


class TraceNotOne(InvalidState):
    pass


class NotPositive(InvalidState):
    pass


class SubmatrixViolation(InvalidState):
    pass


class BadRank(QDualityError):
    pass


class ParamOutOfRange(QDualityError):
    pass


class UnknownMeasure(QDualityError):
    pass
