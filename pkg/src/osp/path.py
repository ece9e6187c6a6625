"""Path collections: validation, query construction, derivation and expansion.

Validation works over the virtual sequence ``V = [origin] + elements`` so the
origin always counts as an already-visited node.  The four checks are:

1. origin connectivity: the first element is the origin, an edge touching
   the origin, or a node sharing an edge with the origin;
2. sequential connectivity: every later element is justified by something
   before it in ``V`` (a node joined to it by an edge, an edge it is an
   endpoint of, or, for an edge, one of its endpoints);
3. completeness: every element is reachable from the origin through nodes
   already listed, crossing edges implicitly;
4. traversal coherence: each element's *anchor* (the smallest index in ``V``
   that justifies it, honouring the path direction) never decreases along
   the sequence, i.e. the order is one a breadth-first walk could produce.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .errors import DeadReferenceError, ExpansionError, InvalidPathError
from .graph import Direction, Instance, SystemState

CONSTRAINT_NAMES = {
    1: "Origin Connectivity",
    2: "Sequential Connectivity",
    3: "Path Completeness",
    4: "Traversal Coherence",
}

Predicate = Callable[[Instance], bool]


@dataclass(frozen=True)
class Violation:
    constraint: int
    index: int
    message: str

    def __str__(self) -> str:
        return (
            f"{CONSTRAINT_NAMES[self.constraint]} violated at index {self.index}: {self.message}"
        )


@dataclass(frozen=True)
class PathCollection:
    origin: int
    elements: tuple[int, ...]
    direction: Direction = Direction.ANY

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)


def _justifies(state: SystemState, y: int, x: int, d: Direction) -> bool:
    """Does earlier element ``y`` license element ``x`` (respecting ``d``)?"""
    if state.is_node(x):
        if state.is_node(y):
            for e in state.edges_at(y, d):
                if state.next_node(e, y) == x:
                    return True
            return False
        edge = state.edges[y]
        return x in (edge.src, edge.dst)
    if state.is_node(y):
        edge = state.edges[x]
        if d is Direction.OUT:
            return edge.src == y
        if d is Direction.IN:
            return edge.dst == y
        return y in (edge.src, edge.dst)
    return False


def _check_live(state: SystemState, origin: int, elements: Sequence[int]) -> None:
    if not state.is_node(origin):
        raise DeadReferenceError(f"origin {origin} is not a live node")
    for i, x in enumerate(elements):
        if not state.is_location(x):
            raise DeadReferenceError(f"element {i} ({x}) is not a live node or edge")


def validate_path(
    state: SystemState,
    origin: int,
    elements: Sequence[int],
    direction: "Direction | str" = Direction.ANY,
) -> Violation | None:
    """Return ``None`` when the path is valid, else the first violation."""
    d = Direction.parse(direction)
    _check_live(state, origin, elements)
    seq = [origin, *elements]
    # Nodes already listed and connected to the origin through listed nodes.
    reach = {origin}
    listed_nodes = {origin}
    prev_anchor = 0
    for i, x in enumerate(elements):
        v = i + 1
        is_node = state.is_node(x)
        if i == 0:
            if not (x == origin or _justifies(state, origin, x, Direction.ANY)):
                return Violation(1, 0, f"{x} is not the origin nor touches origin {origin}")
        elif not any(_justifies(state, seq[j], x, Direction.ANY) for j in range(v)):
            return Violation(2, i, f"{x} is not connected to any earlier element")
        if is_node:
            complete = x == origin or any(state.adjacent(r, x) for r in reach)
        else:
            edge = state.edges[x]
            complete = edge.src in reach or edge.dst in reach
        if not complete:
            return Violation(3, i, f"{x} has no route from origin {origin} through listed nodes")
        if i == 0 and x == origin:
            anchor = 0
        else:
            anchor = next((j for j in range(v) if _justifies(state, seq[j], x, d)), None)
        if anchor is None:
            return Violation(4, i, f"{x} is not reachable {d.value} from any earlier element")
        if anchor < prev_anchor:
            return Violation(
                4, i, f"{x} is anchored at {anchor}, before the previous anchor {prev_anchor}"
            )
        prev_anchor = anchor
        if is_node:
            listed_nodes.add(x)
            _grow_reach(state, reach, listed_nodes)
    return None


def _grow_reach(state: SystemState, reach: set[int], listed: set[int]) -> None:
    frontier = list(reach)
    while frontier:
        n = frontier.pop()
        for m in state.neighbors(n):
            if m in listed and m not in reach:
                reach.add(m)
                frontier.append(m)


def make_path(
    state: SystemState,
    origin: int,
    elements: Iterable[int],
    direction: "Direction | str" = Direction.ANY,
) -> PathCollection:
    elements = tuple(elements)
    d = Direction.parse(direction)
    violation = validate_path(state, origin, elements, d)
    if violation is not None:
        raise InvalidPathError(violation)
    return PathCollection(origin, elements, d)


def revalidate(state: SystemState, p: PathCollection) -> PathCollection:
    return make_path(state, p.origin, p.elements, p.direction)


def path_query(
    state: SystemState,
    origin: int,
    pred: Predicate,
    include_edges: bool = False,
    direction: "Direction | str" = Direction.ANY,
) -> PathCollection:
    """Breadth-first construction from ``origin``.

    Nodes rejected by ``pred`` are neither listed nor expanded, which keeps
    every listed node adjacent to an earlier one.  An edge is listed right
    before the node it discovered when ``include_edges`` holds and ``pred``
    accepts it; the edge predicate never gates traversal.
    """
    d = Direction.parse(direction)
    state.get(origin, "node")
    out: list[int] = []
    if pred(state.nodes[origin]):
        out.append(origin)
    seen = {origin}
    frontier = deque([origin])
    while frontier:
        n = frontier.popleft()
        hops = sorted((state.next_node(e, n), e) for e in state.edges_at(n, d))
        for far, e in hops:
            if far in seen:
                continue
            seen.add(far)
            if not pred(state.nodes[far]):
                continue
            if include_edges and pred(state.edges[e]):
                out.append(e)
            out.append(far)
            frontier.append(far)
    return PathCollection(origin, tuple(out), d)


def concat_paths(state: SystemState, p: PathCollection, q: "PathCollection | Sequence[int]") -> PathCollection:
    tail = q.elements if isinstance(q, PathCollection) else tuple(q)
    return make_path(state, p.origin, p.elements + tail, p.direction)


def slice_path(state: SystemState, p: PathCollection, start: int, stop: int | None = None) -> PathCollection:
    return make_path(state, p.origin, p.elements[start:stop], p.direction)


def filter_path(state: SystemState, p: PathCollection, pred: Predicate) -> PathCollection:
    kept = [x for x in p.elements if pred(state.instances[x])]
    return make_path(state, p.origin, kept, p.direction)


def derive_path(state: SystemState, p: PathCollection, transform: tuple) -> PathCollection:
    """Apply ``("concat", q)``, ``("slice", i, j)`` or ``("filter", pred)``."""
    op, *args = transform
    if op == "concat":
        return concat_paths(state, p, *args)
    if op == "slice":
        return slice_path(state, p, *args)
    if op == "filter":
        return filter_path(state, p, *args)
    raise ValueError(f"unknown path transform {op!r}")


def _hops(state: SystemState, start: int, targets: set[int]) -> list[int] | None:
    """Shortest undirected node route from ``start`` to any target, excluding start."""
    if start in targets:
        return []
    parent = {start: start}
    frontier = deque([start])
    while frontier:
        n = frontier.popleft()
        for m in state.neighbors(n):
            if m in parent:
                continue
            parent[m] = n
            if m in targets:
                route = [m]
                while parent[route[-1]] != start:
                    route.append(parent[route[-1]])
                return route[::-1]
            frontier.append(m)
    return None


def expand_path(
    state: SystemState,
    p: PathCollection,
    start: int,
    entry: int | None = None,
) -> list[int]:
    """Turn ``p`` into a sequence a walker at ``start`` can follow hop by hop.

    ``entry`` names the node a walker standing on an edge came from; without
    it either endpoint may serve as the exit.  Node elements equal to the
    current node are dropped, missing intermediate nodes are inserted along
    shortest undirected routes, and an edge is always followed by its far
    endpoint.
    """
    out: list[int] = []
    cur = start
    if state.is_edge(cur):
        exits = {state.next_node(cur, entry)} if entry is not None else {
            state.edges[cur].src,
            state.edges[cur].dst,
        }
    else:
        state.get(cur, "node")

    def leave_edge(nxt: int | None) -> int:
        # From an edge the only legal move is to its far endpoint.
        target = nxt if nxt in exits else min(exits)
        out.append(target)
        return target

    for x in p.elements:
        if state.is_edge(cur):
            if state.is_node(x) and x in exits:
                out.append(x)
                cur = x
                continue
            cur = leave_edge(None)
        if state.is_node(x):
            if x == cur:
                continue
            route = _hops(state, cur, {x})
            if route is None:
                raise ExpansionError(f"no route from {cur} to {x}")
            out.extend(route)
            cur = x
        else:
            edge = state.edges[x]
            route = _hops(state, cur, {edge.src, edge.dst})
            if route is None:
                raise ExpansionError(f"no route from {cur} to edge {x}")
            out.extend(route)
            near = route[-1] if route else cur
            out.append(x)
            exits = {state.next_node(x, near)}
            cur = x
    if state.is_edge(cur):
        leave_edge(None)
    return out
