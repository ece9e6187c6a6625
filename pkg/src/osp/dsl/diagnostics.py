from __future__ import annotations

from dataclasses import dataclass

from ..errors import OSPError


@dataclass(frozen=True)
class Diagnostic:
    severity: str
    line: int
    col: int
    message: str

    def render(self, filename: str = "<input>") -> str:
        return f"{filename}:{self.line}:{self.col}: {self.severity}: {self.message}"


class DiagnosticError(OSPError):
    """Lexing, parsing or static checking failed."""

    def __init__(self, diagnostics: list[Diagnostic]) -> None:
        super().__init__("; ".join(f"{d.line}:{d.col}: {d.message}" for d in diagnostics))
        self.diagnostics = diagnostics


class DslRuntimeError(OSPError):
    """A driver statement or ability body failed while running."""

    def __init__(self, message: str, pos: tuple[int, int] | None = None) -> None:
        super().__init__(message)
        self.pos = pos
