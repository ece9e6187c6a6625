"""Walker execution: spawn, visit, movement, skip, disengage and the trace."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Sequence

from .abilities import Phase, run_visit_phase
from .errors import (
    DisengageSignal,
    EngineError,
    OSPError,
    SkipSignal,
    StepBudgetExceeded,
)
from .graph import ArchetypeDef, Direction, SystemState
from .path import PathCollection, expand_path, revalidate
from .values import render_value

DEFAULT_BUDGET = 100_000


@dataclass(frozen=True)
class TraceEvent:
    seq: int
    kind: str
    walker: int | None
    location: int | None
    detail: str = ""

    def render(self) -> str:
        w = "none" if self.walker is None else self.walker
        loc = "none" if self.location is None else self.location
        line = f"{self.seq} {self.kind} w={w} loc={loc}"
        return f"{line} {self.detail}" if self.detail else line


@dataclass(frozen=True)
class Towards:
    """Visit target: every edge at the current node in ``direction``.

    ``arch`` filters by edge archetype, or by far-node archetype when it
    names a node archetype.
    """

    direction: Direction = Direction.ANY
    arch: ArchetypeDef | None = None


@dataclass(frozen=True)
class EdgeEntry:
    """Spawn target: an edge entered from the given endpoint."""

    edge: int
    entry: int


class Engine:
    def __init__(
        self,
        state: SystemState,
        budget: int = DEFAULT_BUDGET,
        on_event: Callable[[TraceEvent], None] | None = None,
    ) -> None:
        if budget < 1:
            raise ValueError("step budget must be at least 1")
        self.state = state
        self.budget = budget
        self.steps = 0
        self.trace: list[TraceEvent] = []
        self.reports: list[Any] = []
        self.on_event = on_event
        self._stack: list[int] = []

    # -- trace ------------------------------------------------------------

    def emit(self, kind: str, walker: int | None, location: int | None, detail: str = "") -> TraceEvent:
        ev = TraceEvent(len(self.trace) + 1, kind, walker, location, detail)
        self.trace.append(ev)
        if self.on_event is not None:
            self.on_event(ev)
        return ev

    def trace_text(self) -> str:
        return "".join(ev.render() + "\n" for ev in self.trace)

    def report(self, value: Any, walker: int | None = None, location: int | None = None, text: str | None = None) -> None:
        self.reports.append(value)
        self.emit("report", walker, location, render_value(value) if text is None else text)

    # -- spawn ------------------------------------------------------------

    def spawn(self, w: int, target: Any) -> None:
        """Activate ``w`` at ``target`` and run it until it is inactive again."""
        st = self.state
        st.get(w, "walker")
        if st.active[w]:
            raise EngineError(f"walker {w} is already active")
        outermost = not self._stack
        self._stack.append(w)
        try:
            loc, queue, entry, detail = self._spawn_plan(target)
            st.queue[w][:] = queue
            st.location[w] = loc
            st.active[w] = True
            if entry is not None:
                st.source[(w, loc)] = entry
            self.emit("spawn", w, loc, detail)
            self._drive(w, loc)
        except BaseException as exc:
            if st.active.get(w):
                self._reset(w)
            if outermost and isinstance(exc, OSPError):
                self.emit("error", w, None, str(exc))
            raise
        finally:
            self._stack.pop()

    def _spawn_plan(self, target: Any) -> tuple[int, list[int], int | None, str]:
        st = self.state
        if isinstance(target, PathCollection):
            p = revalidate(st, target)
            if not p.elements:
                raise EngineError("cannot spawn on an empty path")
            first, rest = p.elements[0], list(p.elements[1:])
            if st.is_node(first):
                return first, rest, None, f"path len={len(p)}"
            edge = st.edges[first]
            if rest and rest[0] == edge.dst:
                rest.pop(0)
            return first, [edge.dst, *rest], edge.src, f"path len={len(p)}"
        if isinstance(target, EdgeEntry):
            edge = st.get(target.edge, "edge")
            far = st.next_node(edge.id, target.entry)
            return edge.id, [far], target.entry, f"edge entry={target.entry}"
        if isinstance(target, tuple) and len(target) == 2:
            return self._spawn_plan(EdgeEntry(*target))
        if st.is_node(target):
            return target, [], None, "node"
        if st.is_edge(target):
            edge = st.edges[target]
            return target, [edge.dst], edge.src, f"edge entry={edge.src}"
        raise EngineError(f"spawn target {target!r} is not a live node, edge or path")

    # -- run loop ---------------------------------------------------------

    def _tick(self) -> None:
        self.steps += 1
        if self.steps > self.budget:
            raise StepBudgetExceeded(f"step budget of {self.budget} exhausted")

    def _here(self, w: int, loc: int) -> bool:
        return bool(self.state.active.get(w)) and self.state.location.get(w) == loc

    def _drive(self, w: int, loc: int) -> None:
        st = self.state
        while True:
            self._tick()
            self.emit("arrive", w, loc)
            if st.is_edge(loc):
                far = st.next_node(loc, st.source[(w, loc)])
                if far not in st.queue[w]:
                    st.queue[w].append(far)
                    self.emit("autoqueue", w, loc, f"+{far}")
            try:
                run_visit_phase(self, w, loc, Phase.ENTRY)
                if not self._here(w, loc):
                    self.emit("disengage", w, loc, "deleted")
                    return
                if not st.queue[w]:
                    self._exhaust(w, loc)
                    return
                run_visit_phase(self, w, loc, Phase.EXIT)
                if not self._here(w, loc):
                    self.emit("disengage", w, loc, "deleted")
                    return
                self.emit("depart", w, loc)
            except SkipSignal:
                self.emit("skip", w, loc)
                if not st.queue[w]:
                    self._exhaust(w, loc)
                    return
            except DisengageSignal:
                self._reset(w)
                self.emit("disengage", w, loc)
                return
            loc = self._move(w, loc)

    def _exhaust(self, w: int, loc: int) -> None:
        if self.state.is_edge(loc):
            raise EngineError(f"walker {w} has nowhere to go from edge {loc}: edges cannot be terminal")
        self.state.active[w] = False
        self.emit("exhaust", w, loc)

    def _reset(self, w: int) -> None:
        st = self.state
        st.queue[w].clear()
        st.location[w] = None
        st.active[w] = False
        for key in [k for k in st.source if k[0] == w]:
            del st.source[key]

    def _move(self, w: int, loc: int) -> int:
        st = self.state
        q = st.queue[w]
        head = q.pop(0)
        if not st.is_location(head):
            raise EngineError(f"walker {w} queue head {head} is not a live location")
        if st.is_edge(loc):
            if st.is_edge(head):
                raise EngineError(f"walker {w} cannot move from edge {loc} straight onto edge {head}")
            far = st.next_node(loc, st.source[(w, loc)])
            if head != far:
                raise EngineError(f"walker {w} must leave edge {loc} towards {far}, not {head}")
            del st.source[(w, loc)]
        elif st.is_edge(head):
            st.source[(w, head)] = self._entry_for(loc, head, q)
        st.location[w] = head
        self.emit("move", w, loc, f"-> {head}")
        return head

    def _entry_for(self, loc: int, e: int, rest: Sequence[int]) -> int:
        """The endpoint a walker at ``loc`` enters ``e`` from.

        A queued ``[edge, far]`` pair fixes the direction of travel even when
        the walker reaches it from somewhere else (fan-out visits are consumed
        after earlier destinations), so the endpoint opposite the node queued
        after the edge wins. Without such a node the current node is used if
        it is an endpoint, and the source otherwise.
        """
        edge = self.state.edges[e]
        if rest and rest[0] in (edge.src, edge.dst):
            return self.state.next_node(e, rest[0])
        if loc in (edge.src, edge.dst):
            return loc
        return edge.src

    # -- flow control -----------------------------------------------------

    def _require_running(self, w: int, what: str) -> None:
        if not self.state.active.get(w):
            raise EngineError(f"{what}: walker {w} is not active")
        if not self._stack or self._stack[-1] != w:
            raise EngineError(f"{what}: walker {w} is not the walker currently executing")

    def skip(self, w: int) -> None:
        self._require_running(w, "skip")
        raise SkipSignal(w)

    def disengage(self, w: int) -> None:
        self._require_running(w, "disengage")
        raise DisengageSignal(w)

    # -- visit ------------------------------------------------------------

    def visit(self, w: int, target: Any) -> None:
        """Append ``target`` (node, edge, Towards, path or list of those) to the queue."""
        st = self.state
        st.get(w, "walker")
        if not st.active[w]:
            raise EngineError(f"visit: walker {w} is not active")
        cur = st.location[w]
        if not st.is_node(cur):
            raise EngineError(f"visit: walker {w} is on edge {cur}; visits may only be issued from nodes")
        q = st.queue[w]
        if isinstance(target, (list, tuple)):
            for t in target:
                self.visit(w, t)
        elif isinstance(target, Towards):
            arch = target.arch
            edge_arch = arch if arch is not None and arch.kind == "edge" else None
            for e in st.edges_at(cur, target.direction, edge_arch):
                far = st.next_node(e, cur)
                if arch is not None and arch.kind == "node" and not st.nodes[far].archetype.is_a(arch):
                    continue
                q.extend((e, far))
        elif isinstance(target, PathCollection):
            p = revalidate(st, target)
            if not p.elements:
                return
            first = p.elements[0]
            if st.is_node(first):
                ok = first == cur or st.adjacent(cur, first)
            else:
                ok = cur in (st.edges[first].src, st.edges[first].dst)
            if not ok:
                raise EngineError(f"visit: path start {first} is not reachable from {cur}")
            q.extend(expand_path(st, p, cur))
        elif st.is_node(target):
            if not st.adjacent(cur, target):
                raise EngineError(f"visit: no edge joins {cur} and {target}")
            q.append(target)
        elif st.is_edge(target):
            edge = st.edges[target]
            if cur not in (edge.src, edge.dst):
                raise EngineError(f"visit: {cur} is not an endpoint of edge {target}")
            q.extend((target, st.next_node(target, cur)))
        else:
            raise EngineError(f"visit: {target!r} is not a live node, edge or path")
