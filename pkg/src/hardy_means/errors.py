"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class HardyMeansError(Exception):
    """Base class for all package errors."""


class NonFinite(HardyMeansError, ArithmeticError):
    """A function produced a NaN or infinite value where a finite one was required."""


class BracketInvalid(HardyMeansError, ValueError):
    """The root bracket does not enclose a sign change."""


class QuadratureFailed(HardyMeansError, ArithmeticError):
    """Adaptive quadrature could not reach the requested tolerance."""


class InsufficientSamples(HardyMeansError, ValueError):
    pass


class DomainError(HardyMeansError, ValueError):
    """An argument lies outside the domain where the object is defined."""


class DerivativeVanishes(HardyMeansError, ArithmeticError):
    pass


class ExpressionSyntaxError(HardyMeansError, SyntaxError):
    """Malformed generator text; ``position`` is the 0-based column of the offending token."""

    def __init__(self, message: str, text: str = "", position: int = 0):
        super().__init__(message)
        self.text = text
        self.position = position

    def caret(self) -> str:
        """Two-line rendering of the input with a caret under the bad column."""
        return f"{self.text}\n{' ' * self.position}^"

    def __str__(self) -> str:
        return f"{self.args[0]} (at position {self.position})"


class NonConstantExponent(ExpressionSyntaxError):
    """Exponent is an expression rather than a numeric literal."""


class EmptyInput(HardyMeansError, ValueError):
    pass


class NonPositiveEntry(HardyMeansError, ValueError):
    pass


class RootBracketFailure(HardyMeansError, ArithmeticError):
    """The mean equation showed no sign change on [min x, max x].

    For a genuine mean this cannot happen, so it signals a generator or
    deviation function that is not strictly monotone.
    """


class BracketCap(HardyMeansError, ArithmeticError):
    pass
