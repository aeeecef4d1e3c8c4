"""Tokenizer for the modeling language.

Produces a flat token stream plus recoverable diagnostics; the parser never
sees raw text.  ``#`` starts a line comment.  Keywords are reserved words.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .diagnostics import (
    Diagnostic,
    E_LEX_BAD_ESCAPE,
    E_LEX_BAD_PARAM,
    E_LEX_ILLEGAL_CHAR,
    E_LEX_UNTERMINATED_STRING,
    ERROR,
    SourceSpan,
)

IDENT = "ident"
NUMBER = "number"
STRING = "string"
PARAM = "param"
KEYWORD = "keyword"
OP = "op"
EOF = "eof"

KEYWORDS = frozenset(
    {
        "agent",
        "type",
        "flag",
        "bundle",
        "extends",
        "give",
        "use",
        "if",
        "not",
        "and",
        "num",
        "str",
        "service",
    }
)

_TWO_CHAR_OPS = ("->", "==", "!=")
_ONE_CHAR_OPS = frozenset(";,:.{}=")


@dataclass(frozen=True)
class Token:
    type: str
    value: Union[str, int, float]
    text: str
    span: SourceSpan

    def is_op(self, op: str) -> bool:
        return self.type == OP and self.value == op

    def is_kw(self, word: str) -> bool:
        return self.type == KEYWORD and self.value == word


_ESCAPES = {"\\": "\\", '"': '"', "n": "\n", "t": "\t"}


def tokenize(text: str, file: str = "<model>") -> tuple[list[Token], list[Diagnostic]]:
    tokens: list[Token] = []
    diagnostics: list[Diagnostic] = []
    i = 0
    line = 1
    col = 1
    n = len(text)

    def span_from(start_i: int, start_line: int, start_col: int) -> SourceSpan:
        return SourceSpan(file, start_line, start_col, line, col, start_i, i)

    def emit(type_: str, value, start_i: int, start_line: int, start_col: int) -> None:
        tokens.append(
            Token(type_, value, text[start_i:i], span_from(start_i, start_line, start_col))
        )

    def advance(count: int = 1) -> None:
        nonlocal i, line, col
        for _ in range(count):
            if i < n and text[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        ch = text[i]
        if ch in " \t\r\n":
            advance()
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                advance()
            continue

        start_i, start_line, start_col = i, line, col

        if ch.isalpha() or ch == "_":
            while i < n and (text[i].isalnum() or text[i] == "_"):
                advance()
            word = text[start_i:i]
            if word in KEYWORDS:
                emit(KEYWORD, word, start_i, start_line, start_col)
            else:
                emit(IDENT, word, start_i, start_line, start_col)
            continue

        if ch.isdigit():
            while i < n and text[i].isdigit():
                advance()
            if i + 1 < n and text[i] == "." and text[i + 1].isdigit():
                advance()
                while i < n and text[i].isdigit():
                    advance()
            raw = text[start_i:i]
            value = float(raw)
            if value.is_integer():
                value = int(value)
            emit(NUMBER, value, start_i, start_line, start_col)
            continue

        if ch == "$":
            advance()
            if i >= n or not (text[i].isalpha() or text[i] == "_"):
                diagnostics.append(
                    Diagnostic(
                        ERROR,
                        E_LEX_BAD_PARAM,
                        "'$' must be followed by a parameter name",
                        span_from(start_i, start_line, start_col),
                    )
                )
                continue
            while i < n and (text[i].isalnum() or text[i] == "_"):
                advance()
            emit(PARAM, text[start_i + 1 : i], start_i, start_line, start_col)
            continue

        if ch == '"':
            advance()
            value_chars: list[str] = []
            closed = False
            while i < n:
                c = text[i]
                if c == '"':
                    advance()
                    closed = True
                    break
                if c == "\n":
                    break
                if c == "\\":
                    advance()
                    if i < n and text[i] in _ESCAPES:
                        value_chars.append(_ESCAPES[text[i]])
                        advance()
                    else:
                        bad = text[i] if i < n else "<eof>"
                        diagnostics.append(
                            Diagnostic(
                                ERROR,
                                E_LEX_BAD_ESCAPE,
                                f"unknown escape '\\{bad}' in string",
                                span_from(start_i, start_line, start_col),
                            )
                        )
                        if i < n:
                            value_chars.append(text[i])
                            advance()
                    continue
                value_chars.append(c)
                advance()
            if not closed:
                diagnostics.append(
                    Diagnostic(
                        ERROR,
                        E_LEX_UNTERMINATED_STRING,
                        "string literal is never closed",
                        span_from(start_i, start_line, start_col),
                    )
                )
            emit(STRING, "".join(value_chars), start_i, start_line, start_col)
            continue

        two = text[i : i + 2]
        if two in _TWO_CHAR_OPS:
            advance(2)
            emit(OP, two, start_i, start_line, start_col)
            continue
        if ch in _ONE_CHAR_OPS and two != "==":
            advance()
            emit(OP, ch, start_i, start_line, start_col)
            continue

        advance()
        diagnostics.append(
            Diagnostic(
                ERROR,
                E_LEX_ILLEGAL_CHAR,
                f"unexpected character {ch!r}",
                span_from(start_i, start_line, start_col),
            )
        )

    eof_span = SourceSpan(file, line, col, line, col, i, i)
    tokens.append(Token(EOF, "", "", eof_span))
    return tokens, diagnostics
