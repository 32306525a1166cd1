"""Diagnostics shared by the checker, elaborator and CLI.

Every error carries a stable ``code`` and an optional source ``span``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional


@dataclass(frozen=True)
class Span:
    line: int
    col: int
    end_line: int = 0
    end_col: int = 0

    def __str__(self) -> str:
        return f"{self.line}:{self.col}"


class ModmlError(Exception):
    code = "E-INTERNAL"

    def __init__(self, message: str, span: Optional[Span] = None, path: tuple = ()):
        super().__init__(message)
        self.message = message
        self.span = span
        self.path = path

    def at(self, span: Optional[Span]) -> "ModmlError":
        if self.span is None and span is not None:
            self.span = span
        return self

    def to_json(self) -> dict:
        return {
            "code": self.code,
            "message": self.message,
            "span": None if self.span is None else [self.span.line, self.span.col],
        }

    def __str__(self) -> str:
        where = f" at {self.span}" if self.span else ""
        return f"{self.code}{where}: {self.message}"


class IllFormed(ModmlError):
    code = "E-ILL-FORMED"


class UniverseViolation(ModmlError):
    code = "E-UNIVERSE"


class TypeMismatch(ModmlError):
    code = "E-MISMATCH"

    def __init__(self, expected: str, actual: str, span: Optional[Span] = None, path: tuple = ()):
        super().__init__(f"expected {expected}, got {actual}", span, path)
        self.expected = expected
        self.actual = actual


class NotModal(ModmlError):
    code = "E-NOT-MODAL"


class UnboundVariable(ModmlError):
    code = "E-UNBOUND"


class CannotSynthesize(ModmlError):
    code = "E-CANNOT-SYNTH"


class Escape(ModmlError):
    code = "E-ESCAPE"


class SyntaxErr(ModmlError):
    code = "E-SYNTAX"

    def __init__(self, message: str, span: Optional[Span] = None, expected: frozenset = frozenset()):
        super().__init__(message, span)
        self.expected = expected


class UnknownField(ModmlError):
    code = "E-UNKNOWN-FIELD"


class DuplicateField(ModmlError):
    code = "E-DUPLICATE"


class SignatureMismatch(ModmlError):
    code = "E-SIG-MISMATCH"


class Stuck(ModmlError):
    code = "E-STUCK"


class FuelExhausted(ModmlError):
    code = "E-FUEL"
