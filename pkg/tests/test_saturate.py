"""The saturation oracle: type closure, ABox saturation, traces."""

import pytest
from hypothesis import given, settings, strategies as st
from random import Random

from strata import (
    BOT,
    TOP,
    AboxGraph,
    ConjSub,
    ExLeft,
    ExRight,
    KbError,
    Role,
    Sub,
    TBox,
    TypeCloser,
    check_stratification,
    oracle_entails,
    replay_derivation,
    restrict,
    saturate_abox,
    type_closure,
)

from oracles import chase, random_abox, random_normal_tbox


def test_type_closure_worked_example(tex):
    tbox, _, _ = tex
    got = type_closure({"A"}, tbox)
    # cross-check by a small chase on the singleton ABox
    labels, incon, capped = chase(tbox, AboxGraph(concept_asserts=[("A", "x")]), 3)
    assert not incon and not capped
    assert got == frozenset(labels["x"]) == frozenset({TOP, "A", "B", "C", "D"})


def test_type_closure_top_alone_stays_top(tex):
    assert type_closure({TOP}, tex[0]) == frozenset({TOP})


def test_type_closure_bot_floods_signature():
    tbox = TBox([Sub("A", BOT), Sub("B", "B")])
    got = type_closure({"A"}, tbox)
    assert got == frozenset({TOP, BOT, "A", "B"})


@settings(max_examples=30)
@given(st.integers(0, 100_000))
def test_type_closure_monotone_extensive_idempotent(seed):
    rng = Random(seed)
    tbox = random_normal_tbox(rng, max_concepts=3, max_roles=2, max_gcis=6)
    names = list(tbox.concept_names)
    s = frozenset(rng.sample(names, rng.randint(0, len(names))))
    s2 = s | frozenset(rng.sample(names, rng.randint(0, len(names))))
    closer = TypeCloser(tbox)
    c1, c2 = closer.closure(s), closer.closure(s2)
    assert s <= c1 and c1 <= c2
    assert closer.closure(c1) == c1


@settings(max_examples=30)
@given(st.integers(0, 100_000))
def test_type_closure_grows_with_the_level(seed):
    rng = Random(seed)
    tbox = random_normal_tbox(rng, max_concepts=3, max_roles=2, max_gcis=6)
    res = check_stratification(tbox)
    if not res.accepted:
        return
    names = list(tbox.concept_names)
    s = frozenset(rng.sample(names, rng.randint(0, len(names))))
    n = rng.randint(0, 2)
    low = type_closure(s, restrict(tbox, res.height, n))
    high = type_closure(s, restrict(tbox, res.height, n + 1))
    assert low <= high


def test_saturate_worked_example(tex):
    tbox, abox, _ = tex
    sat = saturate_abox(tbox, abox)
    assert not sat.inconsistent
    assert sat.entailed("a") == frozenset({TOP, "A", "B", "C", "D"})


def test_saturate_propagates_along_chain():
    tbox = TBox([ExLeft(Role("r"), "A", "A")])
    abox = AboxGraph(
        concept_asserts=[("A", "a3")],
        role_asserts=[(Role("r"), "a1", "a2"), (Role("r"), "a2", "a3")],
    )
    sat = saturate_abox(tbox, abox)
    assert all("A" in sat.entailed(x) for x in ("a1", "a2", "a3"))


def test_saturate_flags_asserted_bot():
    tbox = TBox([], extra_concepts=("Z",))
    abox = AboxGraph(concept_asserts=[(BOT, "b")], role_asserts=[(Role("r"), "a", "b")])
    sat = saturate_abox(tbox, abox)
    assert sat.inconsistent and sat.bot_at == "b"


def test_saturate_detects_anonymous_inconsistency():
    tbox = TBox([ExRight("A", Role("r"), "B"), Sub("B", BOT)])
    sat = saturate_abox(tbox, AboxGraph(concept_asserts=[("A", "a")]))
    assert sat.inconsistent


@settings(max_examples=25)
@given(st.integers(0, 100_000))
def test_saturate_agrees_with_naive_chase(seed):
    rng = Random(seed)
    tbox = random_normal_tbox(rng, max_concepts=3, max_roles=2, max_gcis=6)
    if sum(isinstance(a, ExRight) for a in tbox.axioms) > 2:
        return
    abox = random_abox(rng, list(tbox.concept_names) or ["A"], list(tbox.role_names) or ["r"], 4)
    depth = 2 * 2 ** (len(tbox.concept_names) + 2)
    labels, incon, capped = chase(tbox, abox, depth)
    if capped:
        return
    sat = saturate_abox(tbox, abox)
    assert sat.inconsistent == incon
    if not incon:
        sig = set(tbox.concept_names) | {TOP}
        for a in abox.individuals:
            assert sat.entailed(a) & sig == (labels[a] & sig) | {TOP}


def test_oracle_worked_example_with_trace(tex):
    tbox, abox, _ = tex
    ans, trace = oracle_entails(tbox, abox, "D", "a", want_trace=True)
    assert ans and trace
    assert replay_derivation(tbox, abox, trace, "D", "a")


def test_oracle_no_axioms_no_entailment():
    tbox = TBox([], extra_concepts=("A", "B"))
    abox = AboxGraph(concept_asserts=[("A", "a")])
    assert oracle_entails(tbox, abox, "B", "a") == (False, None)


def test_oracle_ex_falso():
    tbox = TBox([])
    abox = AboxGraph(concept_asserts=[(BOT, "b")], role_asserts=[(Role("r"), "a", "b")])
    ans, trace = oracle_entails(tbox, abox, "Z", "a", want_trace=True)
    assert ans and trace is None  # traces only for consistent KBs


def test_oracle_unknown_individual(tex):
    with pytest.raises(KbError, match="unknown individual"):
        oracle_entails(tex[0], tex[1], "A", "nobody")


@settings(max_examples=25)
@given(st.integers(0, 100_000))
def test_oracle_inconsistency_dominance(seed):
    rng = Random(seed)
    tbox = random_normal_tbox(rng, max_concepts=3, max_roles=2, max_gcis=6)
    abox = random_abox(rng, list(tbox.concept_names) or ["A"], list(tbox.role_names) or ["r"], 3)
    sat = saturate_abox(tbox, abox)
    if sat.inconsistent:
        for a in abox.individuals:
            for c in tbox.concept_names:
                assert oracle_entails(tbox, abox, c, a, sat=sat)[0]


@settings(max_examples=40)
@given(st.integers(0, 100_000))
def test_oracle_traces_replay(seed):
    rng = Random(seed)
    tbox = random_normal_tbox(rng, max_concepts=3, max_roles=2, max_gcis=7)
    abox = random_abox(rng, list(tbox.concept_names) or ["A"], list(tbox.role_names) or ["r"], 4)
    closer = TypeCloser(tbox)
    sat = saturate_abox(tbox, abox, closer)
    if sat.inconsistent:
        return
    for a in abox.individuals:
        for c in tbox.concept_names:
            ans, trace = oracle_entails(tbox, abox, c, a, want_trace=True, sat=sat, closer=closer)
            if ans:
                assert trace is not None
                assert replay_derivation(tbox, abox, trace, c, a)
                if trace:
                    adds = trace[-1].adds
                    assert ("concept", c, a) in adds


def test_trace_materializes_anonymous_successors(tex):
    tbox, abox, _ = tex
    _, trace = oracle_entails(tbox, abox, "D", "a", want_trace=True)
    spawns = [s for s in trace if isinstance(s.axiom, ExRight)]
    assert spawns, "the worked example needs an anonymous witness"
    assert replay_derivation(tbox, abox, trace, "D", "a")


def test_trace_through_seeded_anonymous_context():
    # the anonymous child both receives a seed from its parent and fires back
    tbox = TBox(
        [
            ExRight("A", Role("r"), "B"),
            ExLeft(Role("r", inverted=True), "A", "C"),  # child of an A-node gets C
            ConjSub("B", "C", "E"),
            ExLeft(Role("r"), "E", "G"),
        ]
    )
    abox = AboxGraph(concept_asserts=[("A", "a")])
    ans, trace = oracle_entails(tbox, abox, "G", "a", want_trace=True)
    assert ans
    assert replay_derivation(tbox, abox, trace, "G", "a")


def test_trace_when_successor_contexts_repeat():
    # every A-node spawns an A-child with the same seed, so the anonymous
    # contexts form a cycle; the per-round bookkeeping must still produce a
    # finite derivation (grandchild feeds child feeds root)
    tbox = TBox(
        [
            ExRight("A", Role("r"), "A"),
            ExLeft(Role("r", inverted=True), "A", "P"),
            Sub("P", "Q2"),
            ExLeft(Role("r"), "Q2", "Q"),
            ExLeft(Role("r"), "Q", "G"),
        ]
    )
    abox = AboxGraph(concept_asserts=[("A", "a")])
    ans, trace = oracle_entails(tbox, abox, "G", "a", want_trace=True)
    assert ans
    assert replay_derivation(tbox, abox, trace, "G", "a")
    # the derivation must descend two anonymous levels
    spawns = [s for s in trace if isinstance(s.axiom, ExRight)]
    assert len(spawns) >= 2
