"""Exception hierarchy shared across the package."""


class ArithLatError(Exception):
    """Base class for every error raised by arithlat."""


class DomainError(ArithLatError, ValueError):
    """An argument lies outside the domain of the operation."""


class ShapeError(ArithLatError, ValueError):
    """Matrix dimensions are incompatible."""


class SingularError(ArithLatError, ZeroDivisionError):
    """A matrix or field element that must be invertible is not."""


class PrecisionError(ArithLatError, ArithmeticError):
    """A numeric decision could not be certified at the working precision."""


class SizeError(ArithLatError, RuntimeError):
    """A resource guard (enumeration size, node budget) was exceeded."""


class InvalidInput(ArithLatError, ValueError):
    """Input data violates a documented precondition."""


class ParseError(InvalidInput):
    """Malformed text or JSON input."""


class InternalError(ArithLatError, AssertionError):
    """An exact confirmation failed where theory says it cannot."""


class VerificationFailed(ArithLatError):
    """A verification suite found a counterexample.

    ``witness`` holds a JSON-serialisable description of the counterexample.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness
