"""Textual front end: lexer, parser, checker, printer and interpreter."""

from .ast import Program
from .checker import check
from .diagnostics import Diagnostic, DiagnosticError, DslRuntimeError
from .interpreter import Interpreter, run_source
from .lexer import Token, tokenize
from .parser import parse, parse_source
from .printer import pretty

__all__ = [
    "Diagnostic",
    "DiagnosticError",
    "DslRuntimeError",
    "Interpreter",
    "Program",
    "Token",
    "check",
    "parse",
    "parse_source",
    "pretty",
    "run_source",
    "tokenize",
]
