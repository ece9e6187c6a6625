"""Builtin functions and the runtime value helpers they share with the interpreter."""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Any, Callable

from ..graph import ArchetypeDef, Direction, SystemState
from ..path import PathCollection, concat_paths, filter_path, make_path, path_query, slice_path
from ..values import Ref, render_props, render_value
from .diagnostics import DslRuntimeError

if TYPE_CHECKING:
    from .interpreter import Interpreter


@dataclass(frozen=True, eq=False)
class TypeRef:
    """An archetype used as a value (query filters, ``isa``)."""

    arch: ArchetypeDef

    def __eq__(self, other: object) -> bool:
        return isinstance(other, TypeRef) and other.arch is self.arch

    def __hash__(self) -> int:
        return id(self.arch)


@dataclass(frozen=True)
class QueueView:
    """Live view of one walker's destination queue (the ``path`` reference)."""

    state: SystemState
    walker: int

    @property
    def items(self) -> list[int]:
        return self.state.queue[self.walker]


def render_report(state: SystemState, value: Any) -> str:
    """Text form of a report payload; live instances show archetype and fields."""
    if isinstance(value, Ref):
        inst = state.instances.get(value.id)
        if inst is None:
            return repr(value)
        return f"{inst.archetype.name}@{value.id} {render_props(inst.props)}"
    if isinstance(value, list):
        return "[" + ", ".join(render_report(state, v) for v in value) + "]"
    if isinstance(value, dict):
        return "{" + ", ".join(
            f"{render_value(k)}: {render_report(state, v)}" for k, v in value.items()
        ) + "}"
    if isinstance(value, TypeRef):
        return value.arch.name
    if isinstance(value, QueueView):
        return "[" + ", ".join(render_value(Ref(x)) for x in value.items) + "]"
    if isinstance(value, PathCollection):
        elems = ", ".join(render_value(Ref(x)) for x in value.elements)
        return f"path({render_value(Ref(value.origin))}, [{elems}])"
    return render_value(value)


def type_name(value: Any) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "bool"
    if isinstance(value, int):
        return "int"
    if isinstance(value, float):
        return "float"
    if isinstance(value, str):
        return "str"
    if isinstance(value, list):
        return "list"
    if isinstance(value, dict):
        return "map"
    if isinstance(value, Ref):
        return "ref"
    if isinstance(value, TypeRef):
        return "type"
    if isinstance(value, QueueView):
        return "queue"
    if isinstance(value, PathCollection):
        return "pathcollection"
    return type(value).__name__


def lcs_ratio(a: str, b: str) -> float:
    """2*LCS(a, b) / (len(a) + len(b)); two empty strings count as identical."""
    if not a and not b:
        return 1.0
    prev = [0] * (len(b) + 1)
    for ca in a:
        cur = [0]
        for j, cb in enumerate(b):
            cur.append(prev[j] + 1 if ca == cb else max(prev[j + 1], cur[j]))
        prev = cur
    return round(2 * prev[-1] / (len(a) + len(b)), 6)


# -- builtin table -----------------------------------------------------------

Builtin = Callable[["Interpreter", list, tuple], Any]
BUILTINS: dict[str, tuple[int, int, Builtin]] = {}


def builtin(name: str, lo: int, hi: int | None = None):
    def deco(fn: Builtin) -> Builtin:
        BUILTINS[name] = (lo, lo if hi is None else hi, fn)
        return fn

    return deco


def _fail(msg: str, pos) -> DslRuntimeError:
    return DslRuntimeError(msg, pos)


def _node(it: "Interpreter", v: Any, pos) -> int:
    if not isinstance(v, Ref) or v.id not in it.state.nodes:
        raise _fail(f"expected a live node, got {render_report(it.state, v)}", pos)
    return v.id


def _edge(it: "Interpreter", v: Any, pos) -> int:
    if not isinstance(v, Ref) or v.id not in it.state.edges:
        raise _fail(f"expected a live edge, got {render_report(it.state, v)}", pos)
    return v.id


def _types(v: Any, pos) -> list[ArchetypeDef] | None:
    if v is None:
        return None
    if isinstance(v, TypeRef):
        return [v.arch]
    if isinstance(v, list) and all(isinstance(t, TypeRef) for t in v):
        return [t.arch for t in v]
    raise _fail(f"expected an archetype, a list of archetypes or null, got {type_name(v)}", pos)


def _matches(arches: list[ArchetypeDef] | None, inst) -> bool:
    return arches is None or any(inst.archetype.is_a(a) for a in arches)


def _neighbours(it: "Interpreter", args: list, pos, d: Direction, want: str) -> list[Ref]:
    n = _node(it, args[0], pos)
    arches = _types(args[1], pos) if len(args) > 1 else None
    st = it.state
    edge_types = [a for a in arches or [] if a.kind == "edge"]
    node_types = [a for a in arches or [] if a.kind == "node"]
    if len(edge_types) + len(node_types) != len(arches or []):
        raise _fail("query filters must be node or edge archetypes", pos)
    out: list[Ref] = []
    for e in st.edges_at(n, d):
        far = st.next_node(e, n)
        if edge_types and not any(st.edges[e].archetype.is_a(a) for a in edge_types):
            continue
        if node_types and not any(st.nodes[far].archetype.is_a(a) for a in node_types):
            continue
        ref = Ref(e if want == "edge" else far)
        if ref not in out:
            out.append(ref)
    return out


for _name, _dir in (("out", Direction.OUT), ("in", Direction.IN), ("any", Direction.ANY)):
    BUILTINS[_name] = (1, 2, lambda it, a, p, d=_dir: _neighbours(it, a, p, d, "node"))
    BUILTINS[f"{_name}_edges"] = (1, 2, lambda it, a, p, d=_dir: _neighbours(it, a, p, d, "edge"))


@builtin("edges_between", 2, 3)
def _edges_between(it, args, pos):
    a, b = _node(it, args[0], pos), _node(it, args[1], pos)
    arches = _types(args[2], pos) if len(args) > 2 else None
    return [
        Ref(e)
        for e in it.state.edges_at(a, Direction.OUT)
        if it.state.edges[e].dst == b and _matches(arches, it.state.edges[e])
    ]


@builtin("len", 1)
def _len(it, args, pos):
    v = args[0]
    if isinstance(v, QueueView):
        return len(v.items)
    if isinstance(v, (list, str, dict, PathCollection)):
        return len(v)
    raise _fail(f"len() of {type_name(v)}", pos)


@builtin("str", 1)
def _str(it, args, pos):
    v = args[0]
    return v if isinstance(v, str) else render_report(it.state, v)


@builtin("int", 1)
def _int(it, args, pos):
    try:
        return int(args[0])
    except (TypeError, ValueError):
        raise _fail(f"cannot convert {render_report(it.state, args[0])} to int", pos) from None


@builtin("float", 1)
def _float(it, args, pos):
    try:
        return float(args[0])
    except (TypeError, ValueError):
        raise _fail(f"cannot convert {render_report(it.state, args[0])} to float", pos) from None


@builtin("range", 1, 2)
def _range(it, args, pos):
    if not all(isinstance(a, int) and not isinstance(a, bool) for a in args):
        raise _fail("range() expects integers", pos)
    return list(range(*args))


@builtin("abs", 1)
def _abs(it, args, pos):
    if isinstance(args[0], bool) or not isinstance(args[0], (int, float)):
        raise _fail("abs() expects a number", pos)
    return abs(args[0])


@builtin("isa", 2)
def _isa(it, args, pos):
    v, t = args
    if not isinstance(t, TypeRef):
        raise _fail("isa() expects an archetype as second argument", pos)
    inst = it.state.instances.get(v.id) if isinstance(v, Ref) else None
    return inst is not None and inst.archetype.is_a(t.arch)


@builtin("type", 1)
def _type(it, args, pos):
    v = args[0]
    if isinstance(v, Ref) and v.id in it.state.instances:
        return it.state.instances[v.id].archetype.name
    return type_name(v)


@builtin("id", 1)
def _id(it, args, pos):
    if not isinstance(args[0], Ref):
        raise _fail(f"id() expects an instance, got {type_name(args[0])}", pos)
    return args[0].id


@builtin("src", 1)
def _src(it, args, pos):
    return Ref(it.state.edges[_edge(it, args[0], pos)].src)


@builtin("dst", 1)
def _dst(it, args, pos):
    return Ref(it.state.edges[_edge(it, args[0], pos)].dst)


@builtin("contains", 2)
def _contains(it, args, pos):
    coll, x = args
    if isinstance(coll, QueueView):
        return isinstance(x, Ref) and x.id in coll.items
    if isinstance(coll, PathCollection):
        return isinstance(x, Ref) and x.id in coll.elements
    if isinstance(coll, str):
        if not isinstance(x, str):
            raise _fail("contains() on a string needs a string", pos)
        return x in coll
    if isinstance(coll, (list, dict)):
        return x in coll
    raise _fail(f"contains() on {type_name(coll)}", pos)


@builtin("search_tweets", 2)
def _search(it, args, pos):
    if not all(isinstance(a, str) for a in args):
        raise _fail("search_tweets() expects two strings", pos)
    return lcs_ratio(*args)


def _direction(v: Any, pos) -> Direction:
    try:
        return Direction.parse(v)
    except ValueError:
        raise _fail(f"direction must be \"outgoing\", \"incoming\" or \"any\", got {v!r}", pos) from None


def _path(v: Any, pos) -> PathCollection:
    if not isinstance(v, PathCollection):
        raise _fail(f"expected a path collection, got {type_name(v)}", pos)
    return v


@builtin("pathq", 1, 4)
def _pathq(it, args, pos):
    origin = _node(it, args[0], pos)
    arches = _types(args[1], pos) if len(args) > 1 else None
    include_edges = bool(args[2]) if len(args) > 2 else False
    d = _direction(args[3], pos) if len(args) > 3 else Direction.ANY
    return path_query(it.state, origin, lambda inst: _matches(arches, inst), include_edges, d)


@builtin("makepath", 2, 3)
def _makepath(it, args, pos):
    origin = _node(it, args[0], pos)
    if not isinstance(args[1], list) or not all(isinstance(x, Ref) for x in args[1]):
        raise _fail("makepath() expects a list of nodes and edges", pos)
    d = _direction(args[2], pos) if len(args) > 2 else Direction.ANY
    return make_path(it.state, origin, [x.id for x in args[1]], d)


@builtin("pconcat", 2)
def _pconcat(it, args, pos):
    q = args[1]
    tail = q if isinstance(q, PathCollection) else [x.id for x in q] if isinstance(q, list) else None
    if tail is None:
        raise _fail("pconcat() expects a path or a list as second argument", pos)
    return concat_paths(it.state, _path(args[0], pos), tail)


@builtin("pslice", 2, 3)
def _pslice(it, args, pos):
    return slice_path(it.state, _path(args[0], pos), *args[1:])


@builtin("pfilter", 2)
def _pfilter(it, args, pos):
    arches = _types(args[1], pos)
    return filter_path(it.state, _path(args[0], pos), lambda inst: _matches(arches, inst))
