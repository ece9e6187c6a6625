import pytest

from conftest import ability, chain, kinds
from osp.engine import EdgeEntry, Engine, Towards
from osp.errors import AbilityError, EngineError, StepBudgetExceeded
from osp.graph import Direction
from osp.path import make_path


def test_spawn_on_bare_node(state):
    a = state.create_object("N")
    w = state.create_object("W")
    eng = Engine(state)
    eng.spawn(w, a)
    assert kinds(eng) == [f"spawn w={w} loc={a} node", f"arrive w={w} loc={a}", f"exhaust w={w} loc={a}"]
    assert state.location[w] == a and not state.active[w]


def test_spawn_on_edge_lands_on_destination(state):
    (a, b), (e,) = chain(state, "a", "b")
    w = state.create_object("W")
    eng = Engine(state)
    eng.spawn(w, e)
    assert kinds(eng) == [
        f"spawn w={w} loc={e} edge entry={a}",
        f"arrive w={w} loc={e}",
        f"depart w={w} loc={e}",
        f"move w={w} loc={e} -> {b}",
        f"arrive w={w} loc={b}",
        f"exhaust w={w} loc={b}",
    ]


def test_directed_edge_spawn(state):
    (a, b), (e,) = chain(state, "a", "b")
    w = state.create_object("W")
    seen = []
    ability(state, "E", "src", "W", "entry", lambda ctx: seen.append(ctx.state.source[(ctx.visitor, ctx.self_ref)]))
    Engine(state).spawn(w, EdgeEntry(e, b))
    assert state.location[w] == a and seen == [b]


def test_spawn_active_walker_is_an_error(state):
    a = state.create_object("N")
    w = state.create_object("W")
    eng = Engine(state)

    def again(ctx):
        ctx.spawn(ctx.walker, a)

    ability(state, "W", "again", "N", "entry", again)
    with pytest.raises(AbilityError, match="already active"):
        eng.spawn(w, a)


def test_spawn_on_path(state):
    (a, b, c), (e1, e2) = chain(state, "a", "b", "c")
    w = state.create_object("W")
    eng = Engine(state)
    eng.spawn(w, make_path(state, a, [a, e1, b, e2, c]))
    assert [ev.location for ev in eng.trace if ev.kind == "arrive"] == [a, e1, b, e2, c]
    v = state.create_object("W")
    eng.spawn(v, make_path(state, a, [e1, b]))
    assert [ev.location for ev in eng.trace if ev.kind == "arrive" and ev.walker == v] == [e1, b]
    with pytest.raises(EngineError):
        eng.spawn(state.create_object("W"), make_path(state, a, []))


def test_edge_crossing_replays_the_rules(state):
    (a, b), (e,) = chain(state, "a", "b")
    w = state.create_object("W")
    state.location[w], state.active[w] = a, True
    ability(state, "W", "go", "N", "entry", lambda ctx: ctx.visit(e) if ctx.here == a else None)
    state.active[w] = False
    eng = Engine(state)
    eng.spawn(w, a)
    assert kinds(eng, "arrive", "move", "autoqueue") == [
        f"arrive w={w} loc={a}",
        f"move w={w} loc={a} -> {e}",
        f"arrive w={w} loc={e}",
        f"move w={w} loc={e} -> {b}",
        f"arrive w={w} loc={b}",
    ]


def test_visit_direction_and_filters(state):
    n, x, y, z = (state.create_object("N") for _ in range(4))
    e1 = state.create_edge("E", n, x)
    e2 = state.create_edge("F", n, y)
    e3 = state.create_edge("E", z, n)
    w = state.create_object("W")
    queued = {}

    def look(ctx):
        if ctx.here != n:
            return
        ctx.visit(Towards(Direction.OUT))
        queued["out"] = list(ctx.path)
        ctx.path.clear()
        ctx.visit(Towards(Direction.ANY, ctx.state.archetype("E")))
        queued["any E"] = list(ctx.path)
        ctx.path.clear()
        ctx.visit(y)
        ctx.visit(e3)
        queued["fifo"] = list(ctx.path)
        ctx.path.clear()

    ability(state, "W", "look", "N", "entry", look)
    Engine(state).spawn(w, n)
    assert queued == {"out": [e1, x, e2, y], "any E": [e1, x, e3, z], "fifo": [y, e3, z]}


@pytest.mark.parametrize("how", ["non-adjacent", "from-edge", "inactive"])
def test_visit_errors(state, how):
    (a, b), (e,) = chain(state, "a", "b")
    far = state.create_object("N")
    w = state.create_object("W")
    eng = Engine(state)
    if how == "inactive":
        with pytest.raises(EngineError):
            eng.visit(w, b)
        return
    if how == "non-adjacent":
        ability(state, "W", "bad", "N", "entry", lambda ctx: ctx.visit(far))
        target = a
    else:
        ability(state, "W", "bad", "E", "entry", lambda ctx: ctx.visit(b))
        target = e
    with pytest.raises(AbilityError):
        eng.spawn(w, target)
    assert eng.trace[-1].kind == "error"
    assert not state.active[w]


def test_edge_terminal_is_fatal(state):
    _, (e,) = chain(state, "a", "b")
    ability(state, "W", "wipe", "E", "entry", lambda ctx: ctx.path.clear())
    with pytest.raises(EngineError, match="edges cannot be terminal"):
        Engine(state).spawn(state.create_object("W"), e)


def test_edge_must_exit_far_side(state):
    (a, b), (e,) = chain(state, "a", "b")

    def turn_back(ctx):
        ctx.path[:] = [a]

    ability(state, "W", "turn", "E", "entry", turn_back)
    with pytest.raises(EngineError, match="must leave edge"):
        Engine(state).spawn(state.create_object("W"), e)


def test_skip_moves_on_without_exits(state):
    (a, b), (e,) = chain(state, "a", "b")
    ability(state, "N", "hop", "W", "entry", lambda ctx: (ctx.visit(b), ctx.skip()) if ctx.self_ref == a else None)
    ability(state, "N", "bye", "W", "exit")
    w = state.create_object("W")
    eng = Engine(state)
    eng.spawn(w, a)
    lines = kinds(eng)
    i = lines.index(f"skip w={w} loc={a}")
    assert lines[i + 1 : i + 3] == [f"move w={w} loc={a} -> {b}", f"arrive w={w} loc={b}"]
    assert not any("bye" in ln and f"loc={a}" in ln for ln in lines)


def test_skip_with_empty_queue_exhausts(state):
    a = state.create_object("N")
    ability(state, "W", "stop", "N", "entry", lambda ctx: ctx.skip())
    w = state.create_object("W")
    eng = Engine(state)
    eng.spawn(w, a)
    assert kinds(eng)[-2:] == [f"skip w={w} loc={a}", f"exhaust w={w} loc={a}"]


def test_skip_on_edge_is_a_legal_move(state):
    (a, b), (e,) = chain(state, "a", "b")
    ability(state, "W", "skip_edge", "E", "entry", lambda ctx: ctx.skip())
    ability(state, "W", "never", "E", "exit")
    w = state.create_object("W")
    eng = Engine(state)
    eng.spawn(w, e)
    assert state.location[w] == b
    assert "W.never/exit" not in [ev.detail for ev in eng.trace]


def test_disengage_keeps_props_and_allows_respawn(state):
    (a, b), (e,) = chain(state, "a", "b")

    def note(ctx):
        ctx.state.walkers[ctx.walker].props["log"].append(ctx.here)
        if ctx.here == a:
            ctx.visit(e)
            ctx.disengage()

    ability(state, "W", "note", "N", "entry", note)
    w = state.create_object("W")
    eng = Engine(state)
    eng.spawn(w, a)
    assert (state.location[w], state.active[w], state.queue[w]) == (None, False, [])
    assert not any(k[0] == w for k in state.source)
    assert state.walkers[w].props["log"] == [a]
    eng.spawn(w, b)
    assert state.walkers[w].props["log"] == [a, b]
    with pytest.raises(EngineError):
        eng.disengage(w)


def test_nested_spawn_runs_to_quiescence_first(state):
    (a, b), (e,) = chain(state, "a", "b")
    inner = state.create_object("W")
    order = []

    def outer(ctx):
        if ctx.walker != inner and ctx.here == a:
            order.append("before")
            ctx.spawn(inner, e)
            order.append(("after", ctx.state.location[inner]))

    ability(state, "W", "outer", "N", "entry", outer)
    Engine(state).spawn(state.create_object("W"), a)
    assert order == ["before", ("after", b)]


def test_only_the_running_walker_may_skip(state):
    a = state.create_object("N")
    other = state.create_object("W")
    state.location[other], state.active[other] = a, True
    ability(state, "W", "poke", "N", "entry", lambda ctx: ctx.engine.skip(other) if ctx.walker != other else None)
    with pytest.raises(AbilityError, match="currently executing"):
        Engine(state).spawn(state.create_object("W"), a)


def test_deleting_own_location_stops_the_walker(state):
    (a, b), (e,) = chain(state, "a", "b")
    ability(state, "N", "vanish", "W", "entry", lambda ctx: ctx.state.delete_node(ctx.self_ref))
    ability(state, "W", "never", "N", "entry")
    w = state.create_object("W")
    eng = Engine(state)
    eng.spawn(w, a)
    assert kinds(eng)[-1] == f"disengage w={w} loc={a} deleted"
    assert "W.never/entry" not in [ev.detail for ev in eng.trace]
    assert state.check_invariants() == []


def test_budget_aborts_cycles(state):
    (a, b), (e,) = chain(state, "a", "b")
    state.create_edge("E", b, a)
    ability(state, "W", "loop", "N", "entry", lambda ctx: ctx.visit(Towards(Direction.OUT)))
    w = state.create_object("W")
    eng = Engine(state, budget=50)
    with pytest.raises(StepBudgetExceeded):
        eng.spawn(w, a)
    assert eng.steps == 51
    assert not state.active[w]


def test_report_collects_values(state):
    a = state.create_object("N")
    ability(state, "W", "say", "N", "entry", lambda ctx: ctx.report({"at": ctx.here}))
    eng = Engine(state)
    eng.spawn(state.create_object("W"), a)
    assert eng.reports == [{"at": a}]
    assert kinds(eng, "report")[0].endswith('{"at": %d}' % a)


def test_invariants_hold_after_every_step(state):
    (a, b, c), _ = chain(state, "a", "b", "c")
    problems = []
    eng = Engine(state, on_event=lambda ev: problems.extend(state.check_invariants()))
    ability(state, "W", "go", "N", "entry", lambda ctx: ctx.visit(Towards(Direction.OUT)))
    eng.spawn(state.create_object("W"), a)
    assert problems == []
