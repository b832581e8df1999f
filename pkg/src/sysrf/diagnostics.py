"""Errors reported to users, with enough context to explain a rejection."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Span:
    line: int
    col: int
    end_line: int
    end_col: int

    def __str__(self):
        return f"{self.line}:{self.col}"

    def as_dict(self) -> dict:
        return {"line": self.line, "col": self.col, "endLine": self.end_line, "endCol": self.end_col}


class Diagnostic(Exception):
    """A type error: a stable code, a message, the rule that failed and how we got there."""

    def __init__(
        self,
        code: str,
        message: str,
        rule: str | None = None,
        query=None,
        trail: list[str] | None = None,
        span: Span | None = None,
        cause: Diagnostic | None = None,
    ):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.message = message
        self.rule = rule
        self.query = query
        self.trail = list(trail or [])
        self.span = span
        self.cause = cause

    def root(self) -> Diagnostic:
        d = self
        while d.cause is not None:
            d = d.cause
        return d


class ParseError(Exception):
    def __init__(self, message: str, span: Span | None = None):
        super().__init__(message if span is None else f"{span}: {message}")
        self.code = "ParseError"
        self.message = message
        self.span = span
