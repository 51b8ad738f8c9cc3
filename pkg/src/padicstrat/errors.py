from __future__ import annotations


class PadicStratError(Exception):
    """Base class for every error raised by this package."""


class InvalidContext(PadicStratError, ValueError):
    pass


class ZeroVector(PadicStratError, ValueError):
    pass


class NotUnimodular(PadicStratError, ValueError):
    pass


class NotInContext(PadicStratError, ValueError):
    pass


class EmptySet(PadicStratError, ValueError):
    pass


class NotAnExhibition(PadicStratError, ValueError):
    pass


class NotALift(PadicStratError, ValueError):
    pass


class NotRisometry(PadicStratError, ValueError):
    pass


class NotBijective(PadicStratError, ValueError):
    pass


class ContextMismatch(PadicStratError, ValueError):
    pass


class ExprSyntaxError(PadicStratError, SyntaxError):
    """Parse failure with a position and a description of what was expected."""

    def __init__(self, line: int, col: int, expected: str, got: str | None = None):
        self.line = line
        self.col = col
        self.expected = expected
        self.got = got
        msg = f"line {line}, col {col}: expected {expected}"
        if got is not None:
            msg += f", got {got!r}"
        super().__init__(msg)


class UnknownVariable(PadicStratError, ValueError):
    pass


class DegreeOverflow(PadicStratError, ValueError):
    pass


class PrecisionExhausted(PadicStratError):
    """A question cannot be decided at the working precision p^m.

    ``detail`` carries whatever made the decision impossible (a point, a pair
    of points, an atom).
    """

    def __init__(self, message: str, detail=None):
        super().__init__(message)
        self.detail = detail


class TooLarge(PadicStratError, ValueError):
    pass


class NotATStratification(PadicStratError):
    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class NotVerified(PadicStratError):
    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class BudgetExhausted(PadicStratError):
    def __init__(self, message: str, report=None, stratification=None):
        super().__init__(message)
        self.report = report
        self.stratification = stratification


class PreconditionFailed(PadicStratError, ValueError):
    pass


class DomainMismatch(PadicStratError, ValueError):
    pass


class DepthMismatch(PadicStratError, ValueError):
    pass


class AtMaxDepth(PadicStratError, ValueError):
    pass


class EqualPoints(PadicStratError, ValueError):
    pass


class UnknownFixture(PadicStratError, KeyError):
    pass


class NotExhibiting(PadicStratError, ValueError):
    pass


class UnknownFormat(PadicStratError, ValueError):
    pass
