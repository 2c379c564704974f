"""Exception types raised across the package."""


class LinsolError(Exception):
    """Base class for all package errors."""


class IndexOutOfRange(LinsolError, IndexError):
    pass


class DimensionMismatch(LinsolError, ValueError):
    pass


class EmptyQ(LinsolError, ValueError):
    pass


class DegenerateDenominator(LinsolError, ArithmeticError):
    """Some nonempty column set Q has |Q| == r_Q, so the density is undefined."""


class TooLarge(LinsolError, ValueError):
    pass


class BadPartition(LinsolError, ValueError):
    pass


class BadEmbedding(LinsolError, ValueError):
    pass


class NotAbundant(LinsolError, ValueError):
    pass


class RankIdentityViolation(LinsolError, AssertionError):
    """A proved rank identity failed; this is an implementation bug."""


class Inconsistent(LinsolError, ValueError):
    """The system has no rational solution."""


class BoxTooLarge(LinsolError, ValueError):
    pass


class ZeroCount(LinsolError, ValueError):
    pass


class DegenerateVariance(LinsolError, ArithmeticError):
    pass


class PreconditionError(LinsolError, ValueError):
    pass


class ParseError(LinsolError, ValueError):
    pass
