"""Tokenizer shared by the ``.hrim`` model and ``.hrimd`` descriptor grammars."""

from __future__ import annotations

import re
import string
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Optional, Union

from hrim.model import Span

KEYWORDS = frozenset({
    "model", "kind", "topic", "service", "action", "parameter", "message", "srv",
    "action_schema", "group", "field", "obligation", "category", "direction",
    "unit", "default", "requires",
})
PUNCTUATION = frozenset("{}:,[]=")


class TokenKind(Enum):
    KEYWORD = "keyword"
    IDENT = "ident"
    STRING = "string"
    NUMBER = "number"
    PUNCT = "punct"
    DIRECTIVE = "directive"
    EOF = "eof"


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    text: str
    span: Span
    value: object = None

    def is_(self, kind: TokenKind, text: Optional[str] = None) -> bool:
        return self.kind is kind and (text is None or self.text == text)

    def __repr__(self) -> str:
        return f"[{self.kind.value} {self.text}]"


class LexError(Exception):
    def __init__(self, code: str, message: str, span: Span) -> None:
        super().__init__(message)
        self.code = code
        self.message = message
        self.span = span


class SourceFile:
    """Source text with LF-normalized line endings and a line index."""

    def __init__(self, text: str, path: Union[str, Path] = "<string>") -> None:
        self.path = str(path)
        self.text = text.replace("\r\n", "\n").replace("\r", "\n")
        self._line_starts = [0] + [m.end() for m in re.finditer("\n", self.text)]

    @classmethod
    def read(cls, path: Union[str, Path]) -> "SourceFile":
        return cls(Path(path).read_bytes().decode("utf-8"), path)

    def position(self, offset: int) -> tuple[int, int]:
        lo, hi = 0, len(self._line_starts) - 1
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if self._line_starts[mid] <= offset:
                lo = mid
            else:
                hi = mid - 1
        return lo + 1, offset - self._line_starts[lo] + 1

    def span(self, start: int, end: int) -> Span:
        return Span(*self.position(start), *self.position(end))

    @property
    def end_span(self) -> Span:
        return self.span(len(self.text), len(self.text))


_NUMBER_RE = re.compile(r"-?[0-9]+(?:\.[0-9]+)?(?:[eE][+-]?[0-9]+)?")
_WORD_RE = re.compile(r"[A-Za-z0-9_]+")
_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_DIGITS = frozenset(string.digits)
_WORD_START = frozenset(string.ascii_letters + "_")


def _number_value(text: str) -> Union[int, float]:
    if any(c in text for c in ".eE"):
        return float(text)
    return int(text)


def tokenize(source: SourceFile) -> list[Token]:
    text = source.text
    tokens: list[Token] = []
    pos = 0
    n = len(text)
    while pos < n:
        c = text[pos]
        if c in " \t\n":
            pos += 1
            continue
        if c == "#":
            nl = text.find("\n", pos)
            pos = n if nl < 0 else nl
            continue
        start = pos
        if c in PUNCTUATION:
            tokens.append(Token(TokenKind.PUNCT, c, source.span(pos, pos + 1)))
            pos += 1
        elif c == '"':
            pos += 1
            chars: list[str] = []
            while True:
                if pos >= n or text[pos] == "\n":
                    raise LexError("E_LEX_UNTERMINATED_STRING", "unterminated string",
                                   source.span(start, start + 1))
                ch = text[pos]
                if ch == "\\" and pos + 1 < n and text[pos + 1] in '"\\':
                    chars.append(text[pos + 1])
                    pos += 2
                    continue
                if ch == '"':
                    pos += 1
                    break
                chars.append(ch)
                pos += 1
            value = "".join(chars)
            tokens.append(Token(TokenKind.STRING, value, source.span(start, pos), value))
        elif c == "@":
            m = _IDENT_RE.match(text, pos + 1)
            if m is None:
                raise LexError("E_LEX_ILLEGAL_CHAR", "'@' must start a directive",
                               source.span(pos, pos + 1))
            pos = m.end()
            tokens.append(Token(TokenKind.DIRECTIVE, text[start:pos], source.span(start, pos)))
        elif c in _DIGITS or (c == "-" and pos + 1 < n and text[pos + 1] in _DIGITS):
            m = _NUMBER_RE.match(text, pos)
            end = m.end()
            word = _WORD_RE.match(text, pos) if c != "-" else None
            if word is not None and word.end() > end:
                # digit-led words such as hex identity tokens ("12ab")
                pos = word.end()
                tokens.append(Token(TokenKind.IDENT, text[start:pos], source.span(start, pos)))
            else:
                pos = end
                lit = text[start:pos]
                tokens.append(Token(TokenKind.NUMBER, lit, source.span(start, pos), _number_value(lit)))
        elif c in _WORD_START:
            m = _IDENT_RE.match(text, pos)
            pos = m.end()
            word = text[start:pos]
            kind = TokenKind.KEYWORD if word in KEYWORDS else TokenKind.IDENT
            tokens.append(Token(kind, word, source.span(start, pos)))
        else:
            raise LexError("E_LEX_ILLEGAL_CHAR", f"illegal character {c!r}", source.span(pos, pos + 1))
    tokens.append(Token(TokenKind.EOF, "", source.end_span))
    return tokens
