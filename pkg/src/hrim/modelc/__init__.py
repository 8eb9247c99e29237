"""The HRIM model-definition language: lexer, parser and canonical formatter."""

from hrim.modelc.formatter import format_descriptor, format_model
from hrim.modelc.lexer import LexError, SourceFile, Token, TokenKind, tokenize
from hrim.modelc.parser import (
    ParseFailure,
    ParseResult,
    load_model,
    parse_descriptor,
    parse_model,
)

__all__ = [
    "LexError",
    "ParseFailure",
    "ParseResult",
    "SourceFile",
    "Token",
    "TokenKind",
    "format_descriptor",
    "format_model",
    "load_model",
    "parse_descriptor",
    "parse_model",
    "tokenize",
]
