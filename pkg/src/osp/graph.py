"""Typed in-memory graph and the full system state of a running program.

The state tuple tracks every instance plus, per walker, its destination
queue, current location, activity flag and (while standing on an edge) the
node it entered that edge from.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any, Iterable

from .errors import EdgeCreationError, SchemaError, UnknownInstanceError
from .values import VALUE_KINDS, coerce, conforms, default_for, render_props

ARCHETYPE_KINDS = ("object", "node", "edge", "walker")


class Direction(enum.Enum):
    OUT = "outgoing"
    IN = "incoming"
    ANY = "any"

    @classmethod
    def parse(cls, text: "str | Direction") -> "Direction":
        if isinstance(text, Direction):
            return text
        for d in cls:
            if d.value == text:
                return d
        raise ValueError(f"unknown direction {text!r}")


@dataclass(frozen=True)
class FieldSpec:
    name: str
    kind: str
    default: Any = None
    has_default: bool = False

    def initial(self) -> Any:
        if self.has_default:
            import copy

            return copy.deepcopy(self.default)
        return default_for(self.kind)


@dataclass(eq=False)
class ArchetypeDef:
    name: str
    kind: str
    fields: list[FieldSpec] = field(default_factory=list)
    parent: "ArchetypeDef | None" = None
    abilities: list = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.kind not in ARCHETYPE_KINDS:
            raise SchemaError(f"unknown archetype kind {self.kind!r}")
        seen = set()
        for f in self.fields:
            if f.kind not in VALUE_KINDS:
                raise SchemaError(f"{self.name}.{f.name}: unknown value kind {f.kind!r}")
            if f.name in seen:
                raise SchemaError(f"{self.name}: duplicate field {f.name!r}")
            seen.add(f.name)
            if f.has_default and not conforms(f.kind, f.default):
                raise SchemaError(f"{self.name}.{f.name}: default does not match kind {f.kind}")
        if self.parent is not None:
            if self.parent.kind != self.kind:
                raise SchemaError(
                    f"{self.name}: parent {self.parent.name} is a {self.parent.kind}, not a {self.kind}"
                )
            inherited = {f.name for f in self.parent.all_fields()}
            clash = inherited & seen
            if clash:
                raise SchemaError(f"{self.name}: redeclares inherited field {sorted(clash)[0]!r}")

    def lineage(self) -> list["ArchetypeDef"]:
        """Ancestors root-first, ending with this archetype."""
        chain = []
        cur: ArchetypeDef | None = self
        while cur is not None:
            chain.append(cur)
            cur = cur.parent
        return chain[::-1]

    def all_fields(self) -> list[FieldSpec]:
        return [f for a in self.lineage() for f in a.fields]

    def is_a(self, other: "ArchetypeDef") -> bool:
        cur: ArchetypeDef | None = self
        while cur is not None:
            if cur is other:
                return True
            cur = cur.parent
        return False

    def __repr__(self) -> str:
        return f"ArchetypeDef({self.kind} {self.name})"


@dataclass(eq=False)
class Instance:
    id: int
    archetype: ArchetypeDef
    props: dict[str, Any]

    @property
    def kind(self) -> str:
        return self.archetype.kind


@dataclass(eq=False)
class Edge(Instance):
    src: int = 0
    dst: int = 0


class SystemState:
    """All instances plus walker queues, locations, activity and edge sources."""

    def __init__(self) -> None:
        self.types: dict[str, ArchetypeDef] = {}
        self.instances: dict[int, Instance] = {}
        self.objects: dict[int, Instance] = {}
        self.nodes: dict[int, Instance] = {}
        self.edges: dict[int, Edge] = {}
        self.walkers: dict[int, Instance] = {}
        self.queue: dict[int, list[int]] = {}
        self.location: dict[int, int | None] = {}
        self.active: dict[int, bool] = {}
        self.source: dict[tuple[int, int], int] = {}
        self._incident: dict[int, list[int]] = {}
        self._next_id = 1

    # -- archetypes -------------------------------------------------------

    def define(self, arch: ArchetypeDef) -> ArchetypeDef:
        if arch.name in self.types:
            raise SchemaError(f"archetype {arch.name!r} already defined")
        if arch.parent is not None and self.types.get(arch.parent.name) is not arch.parent:
            raise SchemaError(f"{arch.name}: parent {arch.parent.name!r} is not defined")
        self.types[arch.name] = arch
        return arch

    def archetype(self, arch: "ArchetypeDef | str") -> ArchetypeDef:
        if isinstance(arch, ArchetypeDef):
            return arch
        try:
            return self.types[arch]
        except KeyError:
            raise SchemaError(f"unknown archetype {arch!r}") from None

    # -- lookup -----------------------------------------------------------

    def get(self, ident: int, expected: str | None = None) -> Instance:
        inst = self.instances.get(ident)
        if inst is None or (expected is not None and inst.kind != expected):
            raise UnknownInstanceError(ident, expected or "instance")
        return inst

    def is_node(self, ident: Any) -> bool:
        return ident in self.nodes

    def is_edge(self, ident: Any) -> bool:
        return ident in self.edges

    def is_location(self, ident: Any) -> bool:
        return ident in self.nodes or ident in self.edges

    # -- creation ---------------------------------------------------------

    def _fresh(self) -> int:
        ident = self._next_id
        self._next_id += 1
        return ident

    def _build_props(self, arch: ArchetypeDef, props: dict[str, Any] | None) -> dict[str, Any]:
        specs = arch.all_fields()
        known = {f.name: f for f in specs}
        props = dict(props or {})
        for key in props:
            if key not in known:
                raise SchemaError(f"{arch.name} has no field {key!r}")
        out = {}
        for f in specs:
            if f.name in props:
                value = props[f.name]
                if not conforms(f.kind, value):
                    raise SchemaError(
                        f"{arch.name}.{f.name} expects {f.kind}, got {type(value).__name__}"
                    )
                out[f.name] = coerce(f.kind, value)
            else:
                out[f.name] = f.initial()
        return out

    def create_object(self, arch: "ArchetypeDef | str", props: dict[str, Any] | None = None) -> int:
        arch = self.archetype(arch)
        if arch.kind == "edge":
            raise SchemaError(f"{arch.name} is an edge archetype; use create_edge")
        inst = Instance(0, arch, self._build_props(arch, props))
        inst.id = self._fresh()
        self.instances[inst.id] = inst
        if arch.kind == "node":
            self.nodes[inst.id] = inst
            self._incident[inst.id] = []
        elif arch.kind == "walker":
            self.walkers[inst.id] = inst
            self.queue[inst.id] = []
            self.location[inst.id] = None
            self.active[inst.id] = False
        else:
            self.objects[inst.id] = inst
        return inst.id

    def create_edge(
        self,
        arch: "ArchetypeDef | str",
        src: int,
        dst: int,
        props: dict[str, Any] | None = None,
    ) -> int:
        arch = self.archetype(arch)
        if arch.kind != "edge":
            raise SchemaError(f"{arch.name} is not an edge archetype")
        for end, label in ((src, "source"), (dst, "destination")):
            if end not in self.nodes:
                raise EdgeCreationError(f"{label} {end} is not a live node")
        e = Edge(0, arch, self._build_props(arch, props), src, dst)
        e.id = self._fresh()
        self.instances[e.id] = e
        self.edges[e.id] = e
        self._incident[src].append(e.id)
        if dst != src:
            self._incident[dst].append(e.id)
        return e.id

    # -- deletion ---------------------------------------------------------

    def _purge(self, dead: set[int]) -> None:
        for w, q in self.queue.items():
            if any(x in dead for x in q):
                q[:] = [x for x in q if x not in dead]
        for w, loc in self.location.items():
            if loc in dead:
                # Displaced walkers lose location and activity; the purge
                # above already stripped dead ids from their queues.
                self.location[w] = None
                self.active[w] = False
        for key in [k for k in self.source if k[1] in dead]:
            del self.source[key]

    def _deactivate(self, w: int) -> None:
        self.location[w] = None
        self.active[w] = False
        self.queue[w].clear()
        for key in [k for k in self.source if k[0] == w]:
            del self.source[key]

    def _drop_edge(self, e: int) -> None:
        edge = self.edges.pop(e)
        del self.instances[e]
        self._incident[edge.src].remove(e)
        if edge.dst != edge.src:
            self._incident[edge.dst].remove(e)

    def delete_node(self, n: int) -> None:
        self.get(n, "node")
        doomed = list(self._incident[n])
        for e in doomed:
            self._drop_edge(e)
        del self._incident[n]
        del self.nodes[n]
        del self.instances[n]
        self._purge(set(doomed) | {n})

    def delete_edge(self, e: int) -> None:
        self.get(e, "edge")
        self._drop_edge(e)
        self._purge({e})

    def delete_walker(self, w: int) -> None:
        self.get(w, "walker")
        self._deactivate(w)
        for table in (self.queue, self.location, self.active):
            del table[w]
        del self.walkers[w]
        del self.instances[w]

    def delete(self, ident: int) -> None:
        inst = self.get(ident)
        if inst.kind == "node":
            self.delete_node(ident)
        elif inst.kind == "edge":
            self.delete_edge(ident)
        elif inst.kind == "walker":
            self.delete_walker(ident)
        else:
            del self.objects[ident]
            del self.instances[ident]

    # -- topology ---------------------------------------------------------

    def edges_at(
        self,
        n: int,
        d: "Direction | str" = Direction.ANY,
        arch: ArchetypeDef | None = None,
    ) -> list[int]:
        self.get(n, "node")
        d = Direction.parse(d)
        out = []
        for e in self._incident[n]:
            edge = self.edges[e]
            if d is Direction.OUT and edge.src != n:
                continue
            if d is Direction.IN and edge.dst != n:
                continue
            if arch is not None and not edge.archetype.is_a(arch):
                continue
            out.append(e)
        return out

    def next_node(self, e: int, frm: int) -> int:
        edge = self.get(e, "edge")
        if frm == edge.src:
            return edge.dst
        if frm == edge.dst:
            return edge.src
        raise UnknownInstanceError(frm, f"endpoint of edge {e}")

    def adjacent(self, a: int, b: int) -> bool:
        """True when some edge joins ``a`` and ``b`` in either direction."""
        return any(self.next_node(e, a) == b for e in self._incident.get(a, ()))

    def neighbors(self, n: int) -> list[int]:
        """Distinct undirected neighbours of ``n`` in ascending id order."""
        return sorted({self.next_node(e, n) for e in self._incident[n]})

    # -- inspection -------------------------------------------------------

    def snapshot(self) -> str:
        lines = []
        for ident in sorted(self.instances):
            inst = self.instances[ident]
            name = inst.archetype.name
            props = render_props(inst.props)
            if inst.kind == "node":
                lines.append(f"NODE {ident} {name} {props}")
            elif inst.kind == "edge":
                lines.append(f"EDGE {ident} {name} {inst.src} -> {inst.dst} {props}")
            elif inst.kind == "walker":
                loc = self.location[ident]
                q = ",".join(str(x) for x in self.queue[ident])
                lines.append(
                    f"WALKER {ident} {name} loc={'none' if loc is None else loc} "
                    f"active={'true' if self.active[ident] else 'false'} queue=[{q}] {props}"
                )
            else:
                lines.append(f"OBJECT {ident} {name} {props}")
        return "\n".join(lines) + ("\n" if lines else "")

    def check_invariants(self) -> list[str]:
        """Return a list of human-readable invariant violations (empty if sound)."""
        problems = []
        for e, edge in self.edges.items():
            if edge.src not in self.nodes or edge.dst not in self.nodes:
                problems.append(f"edge {e} references a dead endpoint")
        for w in self.walkers:
            for x in self.queue[w]:
                if not self.is_location(x):
                    problems.append(f"walker {w} queue holds dead id {x}")
            loc = self.location[w]
            if loc is not None and not self.is_location(loc):
                problems.append(f"walker {w} located at dead id {loc}")
            if self.active[w] and loc is None:
                problems.append(f"walker {w} active without a location")
            if loc in self.edges and not self.active[w]:
                problems.append(f"walker {w} inactive on edge {loc}")
            keys = [k for k in self.source if k[0] == w]
            if loc in self.edges:
                if keys != [(w, loc)]:
                    problems.append(f"walker {w} on edge {loc} has source keys {keys}")
            elif keys:
                problems.append(f"walker {w} off-edge but has source keys {keys}")
        return problems

    def iter_locations(self) -> Iterable[int]:
        return sorted(list(self.nodes) + list(self.edges))
