"""Error types shared by every stage of the interpreter."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True, slots=True)
class SourcePos:
    """1-based line and column (in code points), 0-based byte offset."""

    line: int = 1
    column: int = 1
    offset: int = 0

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


NOPOS = SourcePos()


class StaticError(Exception):
    """A lex, parse or desugar error: the program is not legal Babel-17."""

    kind = "error"

    def __init__(self, message: str, pos: SourcePos | None = None, filename: str | None = None):
        super().__init__(message)
        self.message = message
        self.pos = pos or NOPOS
        self.filename = filename

    def __str__(self) -> str:
        where = f"{self.filename}:" if self.filename else ""
        return f"{where}{self.pos.line}:{self.pos.column} {self.kind}: {self.message}"


class LexError(StaticError):
    kind = "lex-error"


class ParseError(StaticError):
    kind = "parse-error"


class DesugarError(StaticError):
    kind = "desugar-error"


class BabelException(Exception):
    """A dynamic exception travelling up the Python stack.

    ``param`` is the (non-exceptional) Babel-17 value the exception carries.
    """

    def __init__(self, param):
        super().__init__(param)
        self.param = param

    def __str__(self) -> str:
        from .render import render

        return f"uncaught exception: {render(self.param)}"
