import sys
from pathlib import Path

import pytest

from osp.graph import ArchetypeDef, FieldSpec, SystemState

TESTS = Path(__file__).parent
ROOT = TESTS.parent
CORPUS = ROOT / "corpus"
GOLDEN = TESTS / "golden"

sys.path.insert(0, str(TESTS))

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def state() -> SystemState:
    """Empty state with a handful of archetypes used across the unit tests."""
    s = SystemState()
    s.define(ArchetypeDef("Thing", "object", [FieldSpec("v", "int", 0, True)]))
    s.define(ArchetypeDef("N", "node", [FieldSpec("name", "str", "", True)]))
    s.define(ArchetypeDef("E", "edge"))
    s.define(ArchetypeDef("F", "edge"))
    s.define(ArchetypeDef("W", "walker", [FieldSpec("log", "list", [], True)]))
    return s


def chain(s: SystemState, *names: str, arch: str = "E") -> tuple[list[int], list[int]]:
    """Nodes named ``names`` joined left to right by edges of ``arch``."""
    nodes = [s.create_object("N", {"name": n}) for n in names]
    edges = [s.create_edge(arch, a, b) for a, b in zip(nodes, nodes[1:])]
    return nodes, edges


def ability(s: SystemState, owner: str, name: str, trigger: str | None, phase: str, body=None):
    """Register a host-callback ability; the default body does nothing."""
    from osp.abilities import AbilityDef, Phase, register_ability

    return register_ability(
        AbilityDef(
            name,
            s.archetype(owner),
            None if trigger is None else s.archetype(trigger),
            Phase(phase),
            body or (lambda ctx: None),
        )
    )


def kinds(engine, *wanted: str) -> list[str]:
    """Trace lines of the given kinds, rendered without sequence numbers."""
    return [ev.render().split(" ", 1)[1] for ev in engine.trace if not wanted or ev.kind in wanted]
