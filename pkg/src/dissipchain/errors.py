"""Exception hierarchy shared by every module."""


class ChainError(Exception):
    """Base class for all errors raised by dissipchain."""


class NotHermitian(ChainError, ValueError):
    pass


class NotPSD(ChainError, ValueError):
    pass


class NoConvergence(ChainError, ArithmeticError):
    pass


class DimensionMismatch(ChainError, ValueError):
    pass


class InvalidState(ChainError, ValueError):
    """A matrix failed the density-matrix checks (trace, Hermiticity, positivity)."""


class InvalidChain(ChainError, ValueError):
    pass


class SiteOutOfRange(ChainError, IndexError):
    pass


class LinkOutOfRange(ChainError, IndexError):
    pass


class GridTooCoarse(ChainError, ValueError):
    pass


class UnknownLabel(ChainError, KeyError):
    pass


class UnknownPair(ChainError, KeyError):
    pass


class FOutOfRange(ChainError, ValueError):
    pass


class UsageError(ChainError):
    pass
