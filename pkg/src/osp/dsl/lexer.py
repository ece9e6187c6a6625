"""Tokenizer. ``#`` starts a comment that runs to the end of the line."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

from .diagnostics import Diagnostic, DiagnosticError

KEYWORDS = frozenset(
    """node edge walker object has can with entry exit spawn visit skip disengage
    del report let if else for in connect on from true false null and or not
    self here visitor path""".split()
)

# Longest first so that e.g. "<-->" wins over "<--" and "<".
OPERATORS = (
    "<-->", "-->", "<--", "]->", "-[",
    "==", "!=", "<=", ">=", "+=", "-=",
    "{", "}", "(", ")", "[", "]", ";", ":", ",", ".",
    "=", "<", ">", "+", "-", "*", "/", "%",
)

_NUMBER = re.compile(r"\d+(\.\d+)?([eE][+-]?\d+)?")
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


@dataclass(frozen=True)
class Token:
    kind: str  # ident, int, float, str, kw, op, eof
    value: object
    line: int
    col: int

    @property
    def pos(self) -> tuple[int, int]:
        return (self.line, self.col)

    def is_(self, kind: str, value: object = None) -> bool:
        return self.kind == kind and (value is None or self.value == value)

    def describe(self) -> str:
        if self.kind == "eof":
            return "end of input"
        if self.kind in ("kw", "op"):
            return f"'{self.value}'"
        return f"{self.kind} {self.value!r}"


def tokenize(source: str) -> list[Token]:
    """Split ``source`` into tokens (no end marker; the parser adds its own)."""
    tokens: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(source)

    def fail(msg: str) -> None:
        raise DiagnosticError([Diagnostic("error", line, col, msg)])

    while i < n:
        ch = source[i]
        if ch == "\n":
            i, line, col = i + 1, line + 1, 1
            continue
        if ch in " \t\r":
            i, col = i + 1, col + 1
            continue
        if ch == "#":
            while i < n and source[i] != "\n":
                i += 1
            continue
        if ch == '"':
            j = i + 1
            while j < n and source[j] != '"':
                if source[j] == "\n":
                    fail("unterminated string literal")
                j += 2 if source[j] == "\\" else 1
            if j >= n:
                fail("unterminated string literal")
            raw = source[i : j + 1]
            try:
                value = json.loads(raw)
            except json.JSONDecodeError:
                fail("malformed escape in string literal")
            tokens.append(Token("str", value, line, col))
            col += j + 1 - i
            i = j + 1
            continue
        m = _NUMBER.match(source, i)
        if m:
            text = m.group(0)
            if m.group(1) or m.group(2):
                tokens.append(Token("float", float(text), line, col))
            else:
                tokens.append(Token("int", int(text), line, col))
            i, col = m.end(), col + len(text)
            continue
        m = _IDENT.match(source, i)
        if m:
            word = m.group(0)
            kind = "kw" if word in KEYWORDS else "ident"
            tokens.append(Token(kind, word, line, col))
            i, col = m.end(), col + len(word)
            continue
        for op in OPERATORS:
            if source.startswith(op, i):
                tokens.append(Token("op", op, line, col))
                i, col = i + len(op), col + len(op)
                break
        else:
            fail(f"illegal character {ch!r}")
    return tokens
