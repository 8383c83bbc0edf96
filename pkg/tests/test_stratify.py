"""Order constraints, the stratification decision, user orders, restriction."""

import pytest
from hypothesis import given, settings, strategies as st
from random import Random

from strata import (
    BOT,
    TOP,
    And,
    AtLeastOne,
    ConjSub,
    ExLeft,
    Exists,
    Gci,
    KbError,
    MustStrict,
    Role,
    Sub,
    TBox,
    check_stratification,
    forced_constraints,
    normalize,
    random_dllite_tbox,
    random_stratified_kb,
    restrict,
    verify_preorder,
)

from oracles import bruteforce_min_heights, bruteforce_stratified, random_normal_tbox

EX3_HEIGHTS = {"A": 0, "B": 1, "C": 2, "r": 2, "D": 3}


def _tprime():
    surface = (Gci(And(Exists(Role("r"), "A"), Exists(Role("s"), "A")), "A"),)
    return normalize(surface)[0]


def test_forced_constraints_worked_example(tex):
    fc = forced_constraints(tex[0])
    # the Top-filler premise pins the role below its consumer, hence r -> D
    assert fc.edges == frozenset(
        {("A", "B"), ("A", "C"), ("B", "C"), ("C", "r"), ("r", "D")}
    )
    assert fc.strict == (AtLeastOne(("A", "C"), ("B", "C"), ConjSub("A", "B", "C")),)


def test_forced_constraints_separating_tbox():
    fc = forced_constraints(_tprime())
    assert fc.edges == frozenset(
        {("r", "A"), ("s", "A"), ("A", "X1"), ("A", "X2"), ("X1", "A"), ("X2", "A")}
    )
    musts = {(c.lo, c.hi) for c in fc.strict if isinstance(c, MustStrict)}
    assert musts == {("A", "X1"), ("A", "X2")}
    assert any(isinstance(c, AtLeastOne) for c in fc.strict)


def test_forced_constraints_empty_tbox():
    fc = forced_constraints(TBox([], extra_concepts=("A",)))
    assert fc.edges == frozenset() and fc.strict == ()


def test_forced_constraints_skip_bot_and_top():
    tbox = TBox(
        [Sub("A", BOT), ConjSub("A", "B", BOT), ExLeft(Role("r"), "A", BOT), Sub(TOP, "B")]
    )
    fc = forced_constraints(tbox)
    assert fc.edges == frozenset() and fc.strict == ()


def test_check_accepts_worked_example(tex):
    tbox, _, _ = tex
    res = check_stratification(tbox)
    assert res.accepted
    assert res.height == {"A": 0, "B": 0, "C": 1, "r": 1, "D": 1}
    assert not res.violations


def test_check_rejects_separating_tbox_with_cycle_report():
    res = check_stratification(_tprime())
    assert not res.accepted
    strict_violations = [v for v in res.violations if v.kind == "strict"]
    assert any("A strictly below X1" in str(v) for v in strict_violations)
    assert any("X1 <= A" in str(v) for v in strict_violations)


def test_check_accepts_single_reachability_axiom():
    tbox = TBox([ExLeft(Role("r"), "A", "A")])
    res = check_stratification(tbox)
    assert res.accepted
    assert res.height == {"A": 0, "r": 0}


@given(st.integers(0, 5000))
def test_check_accepts_all_dllite_core(seed):
    gcis = random_dllite_tbox(Random(seed))
    tbox, _ = normalize(gcis)
    assert check_stratification(tbox).accepted


@settings(max_examples=60)
@given(st.integers(0, 100_000))
def test_check_matches_bruteforce_preorder_search(seed):
    tbox = random_normal_tbox(Random(seed), max_concepts=3, max_roles=2, max_gcis=7)
    assert check_stratification(tbox).accepted == bruteforce_stratified(tbox)


@settings(max_examples=40)
@given(st.integers(0, 100_000))
def test_check_heights_are_pointwise_minimal(seed):
    tbox = random_normal_tbox(Random(seed), max_concepts=3, max_roles=1, max_gcis=6)
    res = check_stratification(tbox)
    best = bruteforce_min_heights(tbox)
    if res.accepted:
        assert best is not None
        assert res.height == best
    else:
        assert best is None


@given(st.integers(0, 5000))
def test_monotone_heights_property(seed):
    tbox, _ = random_stratified_kb(Random(seed))
    res = check_stratification(tbox)
    assert res.accepted
    fc = forced_constraints(tbox)
    for lo, hi in fc.edges:
        assert res.height[lo] <= res.height[hi]
    for c in fc.strict:
        if isinstance(c, MustStrict):
            assert res.height[c.lo] < res.height[c.hi]
        else:
            assert res.height[c.first[0]] < res.height[c.first[1]] or (
                res.height[c.second[0]] < res.height[c.second[1]]
            )


# -- verify_preorder -----------------------------------------------------------


def test_verify_accepts_paper_heights(tex):
    assert verify_preorder(tex[0], EX3_HEIGHTS) == []


def test_verify_rejects_all_zero_heights(tex):
    violations = verify_preorder(tex[0], {n: 0 for n in EX3_HEIGHTS})
    assert any("strictly below" in str(v) for v in violations)


def test_verify_minimal_heights_pointwise_below_paper_heights(tex):
    res = check_stratification(tex[0])
    assert all(res.height[n] <= EX3_HEIGHTS[n] for n in res.height)


def test_verify_errors_on_partial_or_negative_maps(tex):
    with pytest.raises(KbError, match="missing"):
        verify_preorder(tex[0], {"A": 0})
    with pytest.raises(KbError, match="negative"):
        verify_preorder(tex[0], {**EX3_HEIGHTS, "A": -1})
    with pytest.raises(KbError, match="fixed at 0"):
        verify_preorder(tex[0], {**EX3_HEIGHTS, TOP: 2})


@given(st.integers(0, 5000))
def test_verify_accepts_the_checkers_own_heights(seed):
    tbox, _ = random_stratified_kb(Random(seed))
    res = check_stratification(tbox)
    assert verify_preorder(tbox, res.height) == []


# -- restrict -------------------------------------------------------------------


def test_restrict_worked_example_levels(tex):
    tbox, _, heights = tex
    assert set(restrict(tbox, heights, 0).axioms) == {Sub("A", "B")}
    assert set(restrict(tbox, heights, 1).axioms) == set(tbox.axioms)
    assert restrict(tbox, EX3_HEIGHTS, 1).axioms == (Sub("A", "B"),)


def test_restrict_minus_one_is_empty(tex):
    tbox, _, heights = tex
    assert restrict(tbox, heights, -1).axioms == ()


def test_restrict_beyond_max_height_is_identity(tex):
    tbox, _, heights = tex
    assert restrict(tbox, heights, 99).axioms == tbox.axioms


@given(st.integers(0, 5000), st.integers(-1, 4))
def test_restrict_is_monotone(seed, n):
    tbox, _ = random_stratified_kb(Random(seed))
    h = check_stratification(tbox).height
    assert set(restrict(tbox, h, n).axioms) <= set(restrict(tbox, h, n + 1).axioms)


def test_restrict_shares_concept_bits(tex):
    tbox, _, heights = tex
    sub = restrict(tbox, heights, 0)
    assert sub.bit_of == tbox.bit_of
