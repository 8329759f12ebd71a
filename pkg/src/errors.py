"""
errors.py - Exception Hierarchy

Every failure raised by the library derives from :class:`BiwaveError`, so the
CLI can map whole families of problems onto exit codes without catching bare
``Exception``. The concrete classes also inherit from the closest builtin
(``ValueError``, ``RuntimeError``, ...) so callers that only know the
standard library still catch them sensibly.
"""

from __future__ import annotations

from typing import Any


class BiwaveError(Exception):
    """Base class for all library errors."""


class DomainError(BiwaveError, ValueError):
    """Input lies outside the mathematical domain of an operation."""


class ValidationError(DomainError):
    """
    Parameter or configuration validation failed.

    ``problems`` lists every violated condition so callers can report all of
    them in one pass.
    """

    def __init__(self, problems: list[str] | str) -> None:
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class AccuracyError(BiwaveError, ArithmeticError):
    """
    A numerical procedure could not meet its tolerance.

    The best available estimate is kept on the exception so a caller can
    still inspect or report it.
    """

    def __init__(self, message: str, estimate: Any = None, error: float | None = None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class BracketError(BiwaveError, ValueError):
    """Root bracket is degenerate or has no sign change."""


class IntegrationError(BiwaveError, RuntimeError):
    """ODE stepper failed."""
