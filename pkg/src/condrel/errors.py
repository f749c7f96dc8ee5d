"""Exception types shared across the package."""

from __future__ import annotations


class StructuralError(ValueError):
    """A node, edge or catalyst reference does not exist in the graph."""


class GuardExceeded(RuntimeError):
    """An exponential-time routine was asked to work beyond its size limit."""


class GraphFormatError(ValueError):
    """A graph file could not be parsed."""

    def __init__(self, lineno: int | None, message: str):
        self.lineno = lineno
        super().__init__(message if lineno is None else f"line {lineno}: {message}")
