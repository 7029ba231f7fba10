"""Exception hierarchy shared by all modules."""


class EntropowerError(Exception):
    """Base class for every error raised by the package."""


class ValidationError(EntropowerError, ValueError):
    """Bad user input (maps to CLI exit code 2)."""


class NumericalError(EntropowerError, ArithmeticError):
    """A finite result was required but the numerics did not deliver one (exit 3)."""


class ZeroMass(ValidationError):
    pass


class NonPositiveOrder(ValidationError):
    pass


class OutOfRange(ValidationError):
    pass


class DomainError(ValidationError):
    pass


class GridTooCoarse(NumericalError):
    pass


class InsufficientTower(ValidationError):
    pass


class NonFinitePower(NumericalError):
    pass


class OrderUnsupported(ValidationError):
    pass


class DegenerateFit(NumericalError):
    pass


class NoConvergence(NumericalError):
    pass


class InsufficientTail(ValidationError):
    pass


class SpliceFailure(ValidationError):
    pass


class GridFormatError(ValidationError):
    pass
