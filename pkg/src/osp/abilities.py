"""Ability registration, trigger matching and per-visit execution."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import TYPE_CHECKING, Any, Callable

from .errors import (
    AbilityError,
    AbilityRegistrationError,
    DisengageSignal,
    EngineError,
    SkipSignal,
    StepBudgetExceeded,
)
from .graph import ArchetypeDef, Instance, SystemState

if TYPE_CHECKING:
    from .engine import Engine


class Phase(enum.Enum):
    ENTRY = "entry"
    EXIT = "exit"


@dataclass(eq=False)
class AbilityDef:
    name: str
    owner: ArchetypeDef
    trigger: ArchetypeDef | None
    phase: Phase
    body: Callable[["ExecutionContext"], Any]

    @property
    def label(self) -> str:
        return f"{self.owner.name}.{self.name}/{self.phase.value}"


def register_ability(defn: AbilityDef) -> AbilityDef:
    """Attach ``defn`` to its owner after checking owner and trigger kinds.

    A ``None`` trigger matches every counterpart.
    """
    owner = defn.owner
    if owner.kind not in ("node", "edge", "walker"):
        raise AbilityRegistrationError(
            f"{owner.name} is a {owner.kind}; only node, edge and walker archetypes carry abilities"
        )
    if not isinstance(defn.phase, Phase):
        raise AbilityRegistrationError(f"bad phase {defn.phase!r}")
    if defn.trigger is not None:
        allowed = ("node", "edge") if owner.kind == "walker" else ("walker",)
        if defn.trigger.kind not in allowed:
            raise AbilityRegistrationError(
                f"{owner.kind} ability {owner.name}.{defn.name} cannot be triggered by "
                f"{defn.trigger.kind} {defn.trigger.name}"
            )
    owner.abilities.append(defn)
    return defn


def matching_abilities(owner: Instance, counterpart: Instance, phase: Phase) -> list[AbilityDef]:
    """Abilities of ``owner`` triggered by ``counterpart``: ancestors first, then declaration order."""
    found = []
    for arch in owner.archetype.lineage():
        for a in arch.abilities:
            if a.phase is phase and (a.trigger is None or counterpart.archetype.is_a(a.trigger)):
                found.append(a)
    return found


class ExecutionContext:
    """What an ability body sees: its owner, location or visitor, and the walker's queue."""

    def __init__(
        self,
        engine: "Engine",
        walker: int,
        location: int,
        ability: AbilityDef,
        walker_side: bool,
    ) -> None:
        self.engine = engine
        self.walker = walker
        self.ability = ability
        self.walker_side = walker_side
        self.self_ref = walker if walker_side else location
        self.here_ref = location if walker_side else None
        self.visitor_ref = None if walker_side else walker

    @property
    def state(self) -> SystemState:
        return self.engine.state

    @property
    def here(self) -> int:
        if self.here_ref is None:
            raise EngineError("'here' is only defined inside walker abilities")
        return self.here_ref

    @property
    def visitor(self) -> int:
        if self.visitor_ref is None:
            raise EngineError("'visitor' is only defined inside node and edge abilities")
        return self.visitor_ref

    @property
    def path(self) -> list[int]:
        """The walker's live destination queue (mutations are seen by the engine)."""
        return self.engine.state.queue[self.walker]

    def visit(self, target: Any) -> None:
        self.engine.visit(self.walker, target)

    def skip(self) -> None:
        self.engine.skip(self.walker)

    def disengage(self) -> None:
        self.engine.disengage(self.walker)

    def report(self, value: Any) -> None:
        self.engine.report(value, walker=self.walker, location=self.engine.state.location[self.walker])

    def spawn(self, walker: int, target: Any) -> None:
        self.engine.spawn(walker, target)


def run_visit_phase(engine: "Engine", walker: int, location: int, phase: Phase) -> None:
    """Run every matching ability for one phase of one visit.

    Entry runs location abilities before walker abilities; exit runs them the
    other way round.  The matched lists are fixed before the first body runs.
    Stops early if a body deletes the location or otherwise unseats the walker.
    """
    state = engine.state
    w_inst = state.walkers[walker]
    loc_inst = state.instances[location]
    at_location = [(a, False) for a in matching_abilities(loc_inst, w_inst, phase)]
    at_walker = [(a, True) for a in matching_abilities(w_inst, loc_inst, phase)]
    ordered = at_location + at_walker if phase is Phase.ENTRY else at_walker + at_location
    for ability, walker_side in ordered:
        if not state.active.get(walker) or state.location.get(walker) != location:
            return
        engine.emit("ability", walker, location, ability.label)
        ctx = ExecutionContext(engine, walker, location, ability, walker_side)
        try:
            ability.body(ctx)
        except (SkipSignal, DisengageSignal, StepBudgetExceeded, AbilityError):
            raise
        except Exception as exc:
            raise AbilityError(walker, location, ability.label, exc) from exc
