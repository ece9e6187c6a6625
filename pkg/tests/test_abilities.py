import pytest

from conftest import ability, chain, kinds
from osp.abilities import Phase, matching_abilities
from osp.engine import Engine
from osp.errors import AbilityError, AbilityRegistrationError
from osp.graph import ArchetypeDef


def test_registration_preserves_order_and_checks_kinds(state):
    a = ability(state, "N", "first", "W", "entry")
    b = ability(state, "N", "second", "W", "entry")
    assert state.archetype("N").abilities == [a, b]
    ability(state, "W", "on_node", "N", "entry")
    with pytest.raises(AbilityRegistrationError):
        ability(state, "N", "bad", "N", "entry")
    with pytest.raises(AbilityRegistrationError):
        ability(state, "W", "bad", "W", "entry")
    with pytest.raises(AbilityRegistrationError):
        ability(state, "Thing", "bad", "W", "entry")


def test_matching_is_subtype_aware_and_ancestor_first(state):
    state.define(ArchetypeDef("Sub", "walker", parent=state.archetype("W")))
    own = ability(state, "N", "own_sub", "Sub", "entry")
    base = ability(state, "N", "for_base", "W", "entry")
    anyone = ability(state, "N", "any", None, "entry")
    ability(state, "N", "leaving", "W", "exit")
    n = state.nodes[state.create_object("N")]
    w = state.walkers[state.create_object("W")]
    sub = state.walkers[state.create_object("Sub")]
    assert matching_abilities(n, w, Phase.ENTRY) == [base, anyone]
    assert matching_abilities(n, sub, Phase.ENTRY) == [own, base, anyone]
    inherited = ability(state, "W", "walk", "N", "entry")
    mine = ability(state, "Sub", "mine", "N", "entry")
    assert matching_abilities(sub, n, Phase.ENTRY) == [inherited, mine]
    assert matching_abilities(w, n, Phase.EXIT) == []


def test_entry_location_first_exit_walker_first(state):
    (a, b), (e,) = chain(state, "a", "b")
    for owner, trig in (("N", "W"), ("E", "W"), ("W", "N"), ("W", "E")):
        for phase in ("entry", "exit"):
            ability(state, owner, f"{owner.lower()}{trig.lower()}", trig, phase)
    eng = Engine(state)
    w = state.create_object("W")
    eng.spawn(w, e)
    assert kinds(eng, "ability") == [
        f"ability w={w} loc={e} E.ew/entry",
        f"ability w={w} loc={e} W.we/entry",
        f"ability w={w} loc={e} W.we/exit",
        f"ability w={w} loc={e} E.ew/exit",
        f"ability w={w} loc={b} N.nw/entry",
        f"ability w={w} loc={b} W.wn/entry",
    ]


def test_context_references(state):
    (a, b), (e,) = chain(state, "a", "b")
    seen = {}

    def on_node(ctx):
        seen["node"] = (ctx.self_ref, ctx.visitor, ctx.here_ref)

    def on_walker(ctx):
        seen["walker"] = (ctx.self_ref, ctx.here, ctx.visitor_ref)
        seen["path_is_queue"] = ctx.path is ctx.state.queue[ctx.walker]

    ability(state, "N", "n", "W", "entry", on_node)
    ability(state, "W", "w", "N", "entry", on_walker)
    w = state.create_object("W")
    Engine(state).spawn(w, a)
    assert seen == {"node": (a, w, None), "walker": (w, a, None), "path_is_queue": True}


def test_path_mutation_reaches_the_engine(state):
    (a, b), (e,) = chain(state, "a", "b")
    ability(state, "W", "go", "N", "entry", lambda ctx: ctx.path.extend([e, b]) if ctx.here == a else None)
    w = state.create_object("W")
    eng = Engine(state)
    eng.spawn(w, a)
    assert state.location[w] == b


def test_skip_stops_remaining_abilities(state):
    a = state.create_object("N")
    ability(state, "N", "first", "W", "entry", lambda ctx: ctx.skip())
    ability(state, "W", "never", "N", "entry")
    eng = Engine(state)
    eng.spawn(state.create_object("W"), a)
    assert [ev.detail for ev in eng.trace if ev.kind == "ability"] == ["N.first/entry"]


def test_body_error_names_walker_location_and_ability(state):
    a = state.create_object("N")
    ability(state, "N", "boom", "W", "entry", lambda ctx: 1 / 0)
    w = state.create_object("W")
    with pytest.raises(AbilityError) as info:
        Engine(state).spawn(w, a)
    msg = str(info.value)
    assert "N.boom/entry" in msg and str(w) in msg and str(a) in msg
    assert not state.active[w]


def test_revisits_fire_again(state):
    (a, b), (e,) = chain(state, "a", "b")
    ability(state, "N", "count", "W", "entry", lambda ctx: ctx.state.walkers[ctx.visitor].props["log"].append(ctx.self_ref))
    w = state.create_object("W")
    Engine(state).spawn(w, a)
    Engine(state).spawn(w, a)
    assert state.walkers[w].props["log"] == [a, a]
