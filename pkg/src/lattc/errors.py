"""Exception hierarchy shared by every stage of the checker."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class SourceSpan:
    file: str
    start: int
    end: int

    def __post_init__(self):
        if self.start > self.end:
            raise ValueError(f"span start {self.start} after end {self.end}")

    def location(self, text: str | None = None) -> str:
        if text is None:
            return f"{self.file}:{self.start}"
        line = text.count("\n", 0, self.start) + 1
        col = self.start - (text.rfind("\n", 0, self.start) + 1) + 1
        return f"{self.file}:{line}:{col}"


class LattcError(Exception):
    """Base class; ``span`` is filled in whenever a source position is known."""

    def __init__(self, message: str, span: SourceSpan | None = None):
        super().__init__(message)
        self.message = message
        self.span = span

    @property
    def kind(self) -> str:
        return type(self).__name__


class ParseError(LattcError):
    def __init__(self, message, span=None, expected=()):
        super().__init__(message, span)
        self.expected = tuple(sorted(set(expected)))


class ConfigError(LattcError):
    pass


class LatticeError(LattcError):
    pass


class IllegalLevel(LatticeError):
    pass


class UnknownExtension(LatticeError):
    pass


class TypeCheckError(LattcError):
    """A rejected judgement. Subclasses name the violated rule."""


class VarLevelError(TypeCheckError):
    pass


class GateError(TypeCheckError):
    pass


class LevelJoinError(TypeCheckError):
    pass


class ConversionError(TypeCheckError):
    def __init__(self, message, span=None, lhs=None, rhs=None):
        super().__init__(message, span)
        self.lhs = lhs
        self.rhs = rhs


class UniverseError(TypeCheckError):
    pass


class DestructorLevelError(TypeCheckError):
    pass


class EqObserverError(TypeCheckError):
    pass


class FuelExhausted(TypeCheckError):
    pass


class ScopeError(TypeCheckError):
    pass


class UnknownName(LattcError):
    pass
