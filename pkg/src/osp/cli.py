"""Command-line interface: ``osp run|dump|check FILE``.

Exit codes: 0 success, 1 diagnostics (or golden mismatch), 2 runtime error
or unreadable input, 3 step budget exhausted.
"""

from __future__ import annotations

import argparse
import difflib
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import TextIO

from .engine import DEFAULT_BUDGET, TraceEvent
from .errors import OSPError, StepBudgetExceeded
from .dsl.checker import check
from .dsl.diagnostics import DiagnosticError
from .dsl.interpreter import Interpreter
from .dsl.parser import parse_source

EXIT_OK, EXIT_DIAGNOSTICS, EXIT_RUNTIME, EXIT_BUDGET = 0, 1, 2, 3
TRACE_LEVELS = ("quiet", "events", "full")


@dataclass
class RunConfig:
    command: str
    path: Path
    trace: str = "events"
    budget: int = DEFAULT_BUDGET
    dump: bool = False
    golden: Path | None = None


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("budget must be at least 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="osp", description="Run object-spatial programs.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("run", "execute a program and print its trace"),
        ("dump", "execute a program and print the final graph snapshot"),
        ("check", "parse and statically check a program"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("file", type=Path)
        if name == "run":
            p.add_argument("--trace", choices=TRACE_LEVELS, default="events")
            p.add_argument("--dump", action="store_true")
        if name != "check":
            p.add_argument("--budget", type=_positive, default=DEFAULT_BUDGET)
            p.add_argument("--golden", type=Path, default=None)
    return parser


def _event_line(ev: TraceEvent, level: str) -> str | None:
    if level == "quiet":
        return ev.detail if ev.kind == "report" else None
    if level == "events" and ev.kind == "ability":
        return None
    return ev.render()


def execute(cfg: RunConfig, out: TextIO, err: TextIO) -> int:
    name = str(cfg.path)
    try:
        source = cfg.path.read_text(encoding="utf-8")
    except OSError as exc:
        err.write(f"{name}: cannot read input: {exc.strerror or exc}\n")
        return EXIT_RUNTIME
    except UnicodeDecodeError:
        err.write(f"{name}: input is not valid UTF-8\n")
        return EXIT_RUNTIME
    try:
        program = parse_source(source)
        diags = check(program)
        if diags:
            raise DiagnosticError(diags)
    except DiagnosticError as exc:
        for d in exc.diagnostics:
            err.write(d.render(name) + "\n")
        return EXIT_DIAGNOSTICS
    if cfg.command == "check":
        return EXIT_OK

    lines: list[str] = []
    show_trace = cfg.command == "run"

    def on_event(ev: TraceEvent) -> None:
        if not show_trace:
            return
        line = _event_line(ev, cfg.trace)
        if line is not None:
            lines.append(line)
            if cfg.golden is None:
                out.write(line + "\n")

    interp = Interpreter(program, budget=cfg.budget, on_event=on_event)
    try:
        interp.run()
    except OSPError as exc:
        where = f"{name}:{exc.pos[0]}:{exc.pos[1]}" if exc.pos else name
        if isinstance(exc, StepBudgetExceeded):
            err.write(f"{where}: aborted: {exc}\n")
            return EXIT_BUDGET
        err.write(f"{where}: runtime error: {exc}\n")
        return EXIT_RUNTIME

    tail = ""
    if cfg.command == "dump" or cfg.dump:
        tail = interp.state.snapshot()
        if cfg.golden is None:
            out.write(tail)
    if cfg.golden is not None:
        produced = "".join(line + "\n" for line in lines) + tail
        try:
            expected = cfg.golden.read_text(encoding="utf-8")
        except OSError as exc:
            err.write(f"{cfg.golden}: cannot read golden file: {exc.strerror or exc}\n")
            return EXIT_RUNTIME
        if produced != expected:
            diff = difflib.unified_diff(
                expected.splitlines(keepends=True),
                produced.splitlines(keepends=True),
                fromfile=str(cfg.golden),
                tofile="actual",
            )
            err.writelines(diff)
            return EXIT_DIAGNOSTICS
        out.write(f"{name}: matches {cfg.golden}\n")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    cfg = RunConfig(
        command=args.command,
        path=args.file,
        trace=getattr(args, "trace", "events"),
        budget=getattr(args, "budget", DEFAULT_BUDGET),
        dump=getattr(args, "dump", False),
        golden=getattr(args, "golden", None),
    )
    return execute(cfg, sys.stdout, sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
