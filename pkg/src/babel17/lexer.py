"""Tokenizer for Babel-17 source text."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .errors import LexError, SourcePos

KEYWORDS = frozenset(
    """
    begin end object with if then else elseif
    while for do choose random yield match case
    as val def in exception lazy concurrent memoize
    to downto true false nil unittest force this
    try catch typedef typeof module private import not
    and or xor native root lens min max
    """.split()
)

PRAGMAS = frozenset({"assert", "catch", "log", "print", "profile"})

# Longest first; maximal munch.
SYMBOLS = sorted(
    """
    = == <> < <= > >= + - * / ^ ; | & ! ++ -- ** // , :: -> => ? ...
    ( ) [ ] { } . : ~ :> += ++= =+ =++ *= **= =* =** /= //= =/ =// ^= =^
    -= --= =- =--
    """.split(),
    key=len,
    reverse=True,
)

UNICODE_SYMBOLS = {
    "≡": "==",
    "≢": "<>",
    "≤": "<=",
    "≥": ">=",
    "∷": "::",
    "→": "->",
    "⇒": "=>",
    "…": "...",
}

# Word operators that combine with "=" into modifying assignments.
WORD_OPS_SUFFIX = frozenset({"div", "mod", "and", "or", "xor", "min", "max"})
WORD_OPS_PREFIX = frozenset({"div", "mod", "and", "or", "xor"})

_NO_NEWLINE_AFTER_KW = frozenset({"then", "else", "elseif", "do", "in", "case", "try", "catch", "with"})
_CLOSERS = frozenset({")", "]", "}", "...", "!", "?"})


@dataclass(frozen=True, slots=True)
class Token:
    kind: str  # kw ident con int real string sym pragma nl eof
    value: object
    pos: SourcePos
    raw: str

    def is_sym(self, *syms: str) -> bool:
        return self.kind == "sym" and self.value in syms

    def is_kw(self, *kws: str) -> bool:
        return self.kind == "kw" and self.value in kws

    def __repr__(self) -> str:
        return f"Token({self.kind}, {self.value!r}, {self.pos})"


def fold(word: str) -> str:
    """Case-insensitive normal form of an identifier or constructor."""
    return word.casefold()


def _is_word_start(ch: str) -> bool:
    return ch.isalpha()


def _is_word_char(ch: str) -> bool:
    return ch.isalnum() or ch == "_"


_ESCAPES = {'"': '"', "\\": "\\", "n": "\n", "r": "\r"}


def decode_string_literal(raw: str, pos: SourcePos | None = None) -> str:
    """Decode the text between the quotation marks of a string literal."""
    out = []
    i = 0
    base = pos or SourcePos()
    n = len(raw)

    def err(msg: str, at: int) -> LexError:
        return LexError(msg, SourcePos(base.line, base.column + at, base.offset + len(raw[:at].encode())))

    while i < n:
        ch = raw[i]
        if ch == "\n" or ch == "\r":
            raise err("newline inside string literal", i)
        if ch == '"':
            raise err("unescaped quotation mark inside string literal", i)
        if ch != "\\":
            out.append(ch)
            i += 1
            continue
        if i + 1 >= n:
            raise err("dangling backslash in string literal", i)
        esc = raw[i + 1]
        if esc in _ESCAPES:
            out.append(_ESCAPES[esc])
            i += 2
        elif esc in "uU":
            width = 4 if esc == "u" else 8
            digits = raw[i + 2 : i + 2 + width]
            if len(digits) != width or any(c not in "0123456789abcdefABCDEF" for c in digits):
                raise err(f"malformed \\{esc} escape", i)
            cp = int(digits, 16)
            if cp > 0x10FFFF or 0xD800 <= cp <= 0xDFFF:
                raise err("escape does not denote a Unicode scalar value", i)
            out.append(chr(cp))
            i += 2 + width
        else:
            raise err(f"unknown escape \\{esc}", i)
    return "".join(out)


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.i = 0
        self.line = 1
        self.col = 1
        self.offset = 0

    def pos(self) -> SourcePos:
        return SourcePos(self.line, self.col, self.offset)

    def peek(self, k: int = 0) -> str:
        j = self.i + k
        return self.text[j] if j < len(self.text) else ""

    def startswith(self, s: str) -> bool:
        return self.text.startswith(s, self.i)

    def advance(self, count: int = 1) -> str:
        chunk = self.text[self.i : self.i + count]
        for ch in chunk:
            self.offset += len(ch.encode("utf-8"))
            if ch == "\n":
                self.line += 1
                self.col = 1
            else:
                self.col += 1
        self.i += len(chunk)
        return chunk


def tokenize(source: str | bytes) -> list[Token]:
    """Turn source text into a list of tokens ending with an eof token."""
    if isinstance(source, bytes):
        try:
            source = source.decode("utf-8")
        except UnicodeDecodeError as e:
            raise LexError("source is not valid UTF-8", SourcePos(1, 1, e.start)) from None
    return list(_tokens(source))


def _tokens(text: str) -> Iterator[Token]:
    s = _Scanner(text)
    last: Token | None = None

    def emit(tok: Token) -> Token:
        nonlocal last
        last = tok
        return tok

    while True:
        ch = s.peek()
        if ch == "":
            yield Token("eof", None, s.pos(), "")
            return
        if ch in " \t\r\f":
            s.advance()
            continue
        if ch == "\n":
            pos = s.pos()
            s.advance()
            if last is None or last.kind == "nl" or _suppresses_newline(last):
                continue
            yield emit(Token("nl", None, pos, "\n"))
            continue
        if ch == "#":
            pos = s.pos()
            if s.startswith("##"):
                while s.peek() not in ("", "\n"):
                    s.advance()
                continue
            if s.startswith("#("):
                _skip_block_comment(s, pos)
                continue
            s.advance()
            start = s.i
            while _is_word_char(s.peek()):
                s.advance()
            name = text[start : s.i]
            if name not in PRAGMAS:
                raise LexError(f"unknown pragma #{name}", pos)
            yield emit(Token("pragma", name, pos, "#" + name))
            continue
        if ch == '"':
            yield emit(_string(s))
            continue
        if ch.isdigit():
            yield emit(_number(s))
            continue
        if _is_word_start(ch) or ch == "_":
            pos = s.pos()
            start = s.i
            while _is_word_char(s.peek()):
                s.advance()
            word = text[start : s.i]
            if word[0] == "_":
                if word == "_":
                    yield emit(Token("sym", "_", pos, word))
                    continue
                raise LexError(f"identifiers cannot start with an underscore: {word}", pos)
            if word[0].isupper():
                yield emit(Token("con", fold(word), pos, word))
                continue
            if word in WORD_OPS_SUFFIX and s.peek() == "=" and s.peek(1) not in ("=", ">"):
                s.advance()
                yield emit(Token("sym", word + "=", pos, word + "="))
                continue
            if word in KEYWORDS:
                yield emit(Token("kw", word, pos, word))
                continue
            folded = fold(word)
            if folded in KEYWORDS:
                raise LexError(f"{word!r} is neither a keyword nor an identifier", pos)
            yield emit(Token("ident", folded, pos, word))
            continue
        if ch in UNICODE_SYMBOLS:
            pos = s.pos()
            s.advance()
            yield emit(Token("sym", UNICODE_SYMBOLS[ch], pos, ch))
            continue
        if ch == "=" and (op := _prefix_word_op(s)):
            pos = s.pos()
            s.advance(1 + len(op))
            yield emit(Token("sym", "=" + op, pos, "=" + op))
            continue
        for sym in SYMBOLS:
            if s.startswith(sym):
                pos = s.pos()
                s.advance(len(sym))
                yield emit(Token("sym", sym, pos, sym))
                break
        else:
            raise LexError(f"unexpected character {ch!r}", s.pos())


def _suppresses_newline(tok: Token) -> bool:
    if tok.kind == "sym":
        return tok.value not in _CLOSERS and tok.value != "_"
    if tok.kind == "kw":
        return tok.value in _NO_NEWLINE_AFTER_KW
    return False


def _prefix_word_op(s: _Scanner) -> str | None:
    for op in WORD_OPS_PREFIX:
        if s.text.startswith(op, s.i + 1):
            after = s.peek(1 + len(op))
            if not _is_word_char(after):
                return op
    return None


def _skip_block_comment(s: _Scanner, pos: SourcePos) -> None:
    depth = 0
    while True:
        if s.startswith("#("):
            depth += 1
            s.advance(2)
        elif s.startswith(")#"):
            depth -= 1
            s.advance(2)
            if depth == 0:
                return
        elif s.peek() == "":
            raise LexError("unterminated block comment", pos)
        else:
            s.advance()


def _string(s: _Scanner) -> Token:
    pos = s.pos()
    s.advance()
    start = s.i
    while True:
        ch = s.peek()
        if ch == "":
            raise LexError("unterminated string literal", pos)
        if ch == "\n":
            raise LexError("newline inside string literal", s.pos())
        if ch == "\\":
            s.advance(2 if s.peek(1) not in ("", "\n") else 1)
            continue
        if ch == '"':
            break
        s.advance()
    body = s.text[start : s.i]
    s.advance()
    inner = SourcePos(pos.line, pos.column + 1, pos.offset + 1)
    return Token("string", decode_string_literal(body, inner), pos, '"' + body + '"')


_RADIX = {"x": (16, "0123456789abcdefABCDEF"), "b": (2, "01"), "o": (8, "01234567")}


def _number(s: _Scanner) -> Token:
    pos = s.pos()
    start = s.i
    if s.peek() == "0" and s.peek(1) in ("x", "b", "o", "X", "B", "O"):
        radix, digits = _RADIX[s.peek(1).lower()]
        s.advance(2)
        dstart = s.i
        while s.peek() and s.peek() in digits:
            s.advance()
        if s.i == dstart or _is_word_char(s.peek()):
            raise LexError("malformed integer literal", pos)
        raw = s.text[start : s.i]
        return Token("int", int(s.text[dstart : s.i], radix), pos, raw)
    while s.peek().isdigit():
        s.advance()
    is_real = False
    if s.peek() == "." and s.peek(1).isdigit():
        is_real = True
        s.advance()
        while s.peek().isdigit():
            s.advance()
    if s.peek() in ("e", "E"):
        j = 1
        if s.peek(1) in ("+", "-"):
            j = 2
        if not s.peek(j).isdigit():
            raise LexError("malformed real literal", pos)
        is_real = True
        s.advance(j)
        while s.peek().isdigit():
            s.advance()
    if _is_word_char(s.peek()):
        raise LexError("malformed numeric literal", pos)
    raw = s.text[start : s.i]
    if is_real:
        return Token("real", raw, pos, raw)
    return Token("int", int(raw), pos, raw)


def dump_tokens(tokens: list[Token]) -> str:
    lines = []
    for t in tokens:
        raw = t.raw.replace("\n", "\\n")
        lines.append(f"{t.pos.line}:{t.pos.column} {t.kind} {raw}")
    return "\n".join(lines)
