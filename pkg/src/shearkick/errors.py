"""Exception types shared across the package."""


class ShearKickError(Exception):
    """Base class for all errors raised by shearkick."""


class InvalidParameters(ShearKickError, ValueError):
    pass


class NonIntegerTau(ShearKickError, ValueError):
    pass


class ZeroAmplitude(ShearKickError, ValueError):
    pass


class NonFiniteState(ShearKickError, ArithmeticError):
    """An orbit left the guard box or became NaN/inf."""


class NotInvertible(ShearKickError, ValueError):
    """Circle map is not a homeomorphism (2*pi*B >= 1)."""


class NoConvergence(ShearKickError, RuntimeError):
    def __init__(self, message, last=None):
        super().__init__(message)
        self.last = last


class PointBudgetExceeded(ShearKickError, RuntimeError):
    def __init__(self, message, curve=None):
        super().__init__(message)
        self.curve = curve


class DimensionTooLarge(ShearKickError, ValueError):
    pass


class SingularLambda(ShearKickError, ValueError):
    pass


class EmptyData(ShearKickError, ValueError):
    pass


class ConfigError(ShearKickError, ValueError):
    """Invalid run configuration; ``where`` names the offending field or line."""

    def __init__(self, message, where=None):
        self.where = where
        super().__init__(f"{where}: {message}" if where else message)


class CriticalHitWarning(RuntimeWarning):
    """A 1D orbit landed on (numerically) a critical point."""
