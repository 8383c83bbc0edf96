"""Instance-query evaluation over ABoxes.

Three engines answer "does the KB entail C(a)?":

* ``naive``:     faithful product search: breadth-first over pairs of an
                  ABox individual and an automaton state, following exactly
                  the transitions the nested NFA licenses and that pass at
                  the current individual.  Nested automaton tests are
                  evaluated recursively through a memo table.
* ``collapsed``: the production path.  Every transition guard and the
                  acceptance condition are monotone in the premise, and at a
                  fixed individual the premise can only ever accumulate the
                  concepts testable there; so states collapse to (individual,
                  goal) pairs with the premise pinned to that label.  Labels
                  are computed bottom-up per height level and memoized.
* ``oracle``:    saturation (see saturate module).

``entails_iq`` wires the full pipeline: normalize, stratify (or verify a
user-supplied order), consistency pre-check, then the selected engine.  The
pre-check defaults to the oracle: the automata can only reach an individual
along role steps the axioms license, so a Bot asserted at a role-unreachable
individual would be missed by the experimental automaton-based check (kept
available behind ``consistency="automaton"``).

True answers come with a run witness replayable against the run conditions:
role steps follow ABox edges, tests hold at a fixed individual in the
ABox-as-interpretation, the first tuple starts at the query individual, and
the last state accepts.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Tuple

from .kb import (
    BOT,
    TOP,
    AboxGraph,
    ConjSub,
    ExLeft,
    KbError,
    Sub,
    TBox,
    normalize,
)
from .rewrite import AutState, AutoTest, ConceptTest, NestedNfa, RoleStep, TOP_TEST
from .saturate import SatResult, TypeCloser, oracle_entails, saturate_abox
from .stratify import LevelMap, check_stratification, verify_preorder

_TOP_BIT = 1
_BOT_BIT = 2


class NotStratifiedError(KbError):
    def __init__(self, violations):
        self.violations = violations
        lines = "; ".join(str(v) for v in violations)
        super().__init__(f"TBox is not stratified: {lines}")


def _assertion_witness(concept, ind):
    """A one-step run for a goal the start individual satisfies outright."""
    if concept == TOP:
        st = AutState(frozenset({TOP}), TOP)
        return RunStep(ind, st, TOP_TEST, st, ind)
    before = AutState(frozenset({TOP}), concept)
    after = AutState(frozenset({TOP, concept}), concept)
    return RunStep(ind, before, ConceptTest(concept), after, ind)


@dataclass(frozen=True)
class RunStep:
    source: str
    state: AutState
    symbol: object
    next_state: AutState
    target: str


RunWitness = Tuple[RunStep, ...]


class Evaluator:
    """Shared engine state for many queries over one (TBox, ABox) pair."""

    def __init__(self, tbox: TBox, abox: AboxGraph, heights: dict = None):
        if heights is None:
            res = check_stratification(tbox)
            if not res.accepted:
                raise NotStratifiedError(res.violations)
            heights = res.height
        self.tbox = tbox
        self.abox = abox
        self.heights = heights
        self.levels = LevelMap(tbox, heights)
        self._closers: Dict[int, TypeCloser] = {}
        self._sat: Optional[SatResult] = None
        self._sat_closer: Optional[TypeCloser] = None
        self._assert_mask: Dict[str, int] = {}
        self._label: Dict[Tuple[str, int], int] = {}
        self._memo_collapsed: Dict[Tuple[str, str], bool] = {}
        self._memo_naive: Dict[Tuple[str, str, bool], bool] = {}
        self._anon: Dict[Tuple[int, int, int], tuple] = {}
        self._lower_bits: Dict[int, tuple] = {}
        self._bitname = {1 << pos: name for name, pos in tbox.bit_of.items()}
        self.naive_visited = 0
        self.collapsed_visited = 0

    # -- shared plumbing ----------------------------------------------------

    def closer_at(self, n: int) -> TypeCloser:
        n = min(n, self.levels.max_level)
        if n not in self._closers:
            self._closers[n] = TypeCloser(
                self.levels.tbox_at(n), extra_flood_mask=self.levels.con_mask(n)
            )
        return self._closers[n]

    def saturation(self) -> SatResult:
        if self._sat is None:
            self._sat_closer = TypeCloser(self.tbox)
            self._sat = saturate_abox(self.tbox, self.abox, self._sat_closer)
        return self._sat

    def assert_mask(self, ind: str) -> int:
        m = self._assert_mask.get(ind)
        if m is None:
            m = 0
            bit_of = self.tbox.bit_of
            for c in self.abox.asserted[ind]:
                b = bit_of.get(c)
                if b is not None:
                    m |= 1 << b
            self._assert_mask[ind] = m
        return m

    def _require_ind(self, ind: str):
        if ind not in self.abox.asserted:
            raise KbError(f"unknown individual {ind!r}")

    def _goal_bit(self, concept: str) -> Optional[int]:
        b = self.tbox.bit_of.get(concept)
        return None if b is None else 1 << b

    def _lower_concept_bits(self, n: int):
        """(name, bit) pairs for concepts of height < n, lowest first."""
        if n not in self._lower_bits:
            names = self.levels.concepts_at(n - 1)
            self._lower_bits[n] = tuple((c, 1 << self.tbox.bit_of[c]) for c in names)
        return self._lower_bits[n]

    def _anon_goal_swaps(self, level: int, pmask: int, gbit: int):
        """Concept bits B with goal entailed from premise + B at this level.

        With a non-trivial premise, swapping the goal for a premise member
        covers everything a Top swap would, so Top stays a candidate only
        for the bare premise {Top}; this keeps the reachable state space
        tight without losing accepting runs.
        """
        key = (level, pmask, gbit)
        got = self._anon.get(key)
        if got is None:
            closer = self.closer_at(level)
            out = []
            candidates = self.levels.con_mask(level)
            if pmask != _TOP_BIT:
                candidates &= ~_TOP_BIT
            b, pos = candidates, 0
            while b:
                if b & 1 and closer.closure_mask(pmask | (1 << pos)) & gbit:
                    out.append(1 << pos)
                b >>= 1
                pos += 1
            got = tuple(out)
            self._anon[key] = got
        return got

    # -- collapsed engine ----------------------------------------------------

    def label_mask(self, ind: str, n: int) -> int:
        """Top, plus asserted concepts of height <= n, plus strictly lower
        concepts the rewriting itself establishes at `ind`."""
        key = (ind, n)
        got = self._label.get(key)
        if got is None:
            got = _TOP_BIT | (self.assert_mask(ind) & self.levels.con_mask(n))
            for c, bit in self._lower_concept_bits(n):
                if self.collapsed(c, ind):
                    got |= bit
            self._label[key] = got
        return got

    def collapsed(self, concept: str, ind: str, level: int = None) -> bool:
        self._require_ind(ind)
        key = (concept, ind)
        if level is None:
            got = self._memo_collapsed.get(key)
            if got is not None:
                return got
        found = self._collapsed_search(concept, ind, level)[0]
        if level is None:
            self._memo_collapsed[key] = found
        return found

    def _collapsed_search(self, concept: str, ind: str, level: int = None):
        """BFS over (individual, goal) nodes; returns (answer, parents, hit)."""
        if concept == TOP:
            return True, None, (ind, TOP)
        gbit = self._goal_bit(concept)
        if gbit is None:  # no axiom mentions it: only its own assertion helps
            return concept in self.abox.asserted[ind], None, (ind, concept)
        n = self.levels.height(concept) if level is None else level
        neighbors = self.abox.neighbors
        start = (ind, concept)
        parents = {start: None}
        queue = deque([start])
        while queue:
            node = queue.popleft()
            self.collapsed_visited += 1
            x, goal = node
            lab = self.label_mask(x, n)
            bit = self._goal_bit(goal)
            if goal == TOP or (bit is not None and lab & bit) or lab & _BOT_BIT:
                return True, parents, node
            succ = []
            for ax in self.levels.tbox_at(n).by_rhs(goal):
                if isinstance(ax, Sub):
                    succ.append(((x, ax.lhs), ("sbus", ax)))
                elif isinstance(ax, ExLeft):
                    for y in neighbors(x, ax.role):
                        succ.append(((y, ax.filler), ("succ", ax)))
                elif isinstance(ax, ConjSub):
                    b1 = self._goal_bit(ax.lhs1)
                    b2 = self._goal_bit(ax.lhs2)
                    if b1 and lab & b1:
                        succ.append(((x, ax.lhs2), ("noc", ax)))
                    if b2 and lab & b2:
                        succ.append(((x, ax.lhs1), ("noc", ax)))
            if bit is not None:
                for swap in self._anon_goal_swaps(n, lab, bit):
                    succ.append(((x, self._bitname[swap]), ("anon", None)))
            for node2, how in succ:
                if node2 not in parents:
                    parents[node2] = (node, how)
                    queue.append(node2)
        return False, parents, None

    def collapsed_witness(self, concept: str, ind: str) -> Optional[RunWitness]:
        found, parents, hit = self._collapsed_search(concept, ind)
        if not found:
            return None
        n = self.levels.height(concept)

        def state(node):
            x, goal = node
            return AutState(self.tbox.names_of(self.label_mask(x, n)) | {TOP}, goal)

        if parents is None:
            return (_assertion_witness(concept, ind),)
        path = [hit]
        while parents[path[-1]] is not None:
            path.append(parents[path[-1]][0])
        path.reverse()
        steps = []
        for prev, cur in zip(path, path[1:]):
            kind, ax = parents[cur][1]
            sym = RoleStep(ax.role) if kind == "succ" else TOP_TEST
            steps.append(RunStep(prev[0], state(prev), sym, state(cur), cur[0]))
        if not steps:
            st = state(hit)
            steps.append(RunStep(hit[0], st, TOP_TEST, st, hit[0]))
        return tuple(steps)

    # -- naive engine ---------------------------------------------------------

    def naive(self, concept: str, ind: str, include_weak: bool = False) -> bool:
        self._require_ind(ind)
        key = (concept, ind, include_weak)
        got = self._memo_naive.get(key)
        if got is None:
            got = self._naive_search(concept, ind, include_weak)[0]
            self._memo_naive[key] = got
        return got

    def _naive_search(self, concept: str, ind: str, include_weak: bool):
        """Faithful BFS over (individual, premise, goal) product nodes."""
        if concept == TOP:
            return True, None, (ind, _TOP_BIT, TOP)
        gbit0 = self._goal_bit(concept)
        if gbit0 is None:
            return concept in self.abox.asserted[ind], None, None
        n = self.levels.height(concept)
        level_tbox = self.levels.tbox_at(n)
        con_mask = self.levels.con_mask(n)
        neighbors = self.abox.neighbors
        lower = self._lower_concept_bits(n)
        start = (ind, _TOP_BIT, concept)
        parents = {start: None}
        queue = deque([start])
        while queue:
            node = queue.popleft()
            self.naive_visited += 1
            x, pmask, goal = node
            gbit = self._goal_bit(goal)
            if goal == TOP or (gbit is not None and pmask & gbit) or pmask & _BOT_BIT:
                return True, parents, node
            succ = []
            if include_weak:
                b, pos = pmask & ~_TOP_BIT, 0
                while b:
                    if b & 1:
                        succ.append(((x, pmask & ~(1 << pos), goal), TOP_TEST))
                    b >>= 1
                    pos += 1
            readable = (_TOP_BIT | (self.assert_mask(x) & con_mask)) & ~pmask
            b, pos = readable, 0
            while b:
                if b & 1:
                    bit = 1 << pos
                    succ.append(((x, pmask | bit, goal), ConceptTest(self._bitname[bit])))
                b >>= 1
                pos += 1
            for ax in level_tbox.by_rhs(goal):
                if isinstance(ax, Sub):
                    succ.append(((x, pmask, ax.lhs), TOP_TEST))
                elif isinstance(ax, ExLeft):
                    for y in neighbors(x, ax.role):
                        succ.append(((y, _TOP_BIT, ax.filler), RoleStep(ax.role)))
                elif isinstance(ax, ConjSub):
                    b1 = self._goal_bit(ax.lhs1)
                    b2 = self._goal_bit(ax.lhs2)
                    if b1 and pmask & b1:
                        succ.append(((x, pmask, ax.lhs2), TOP_TEST))
                    if b2 and pmask & b2:
                        succ.append(((x, pmask, ax.lhs1), TOP_TEST))
            if gbit is not None:
                for swap in self._anon_goal_swaps(n, pmask, gbit):
                    succ.append(((x, pmask, self._bitname[swap]), TOP_TEST))
            for c, bit in lower:
                if not pmask & bit and self.naive(c, x, include_weak):
                    succ.append(((x, pmask | bit, goal), AutoTest(c)))
            for node2, sym in succ:
                if node2 not in parents:
                    parents[node2] = (node, sym)
                    queue.append(node2)
        return False, parents, None

    def naive_witness(self, concept: str, ind: str, include_weak: bool = False):
        found, parents, hit = self._naive_search(concept, ind, include_weak)
        if not found:
            return None

        def state(node):
            _, pmask, goal = node
            return AutState(self.tbox.names_of(pmask) | {TOP}, goal)

        if parents is None:
            return (_assertion_witness(concept, ind),)
        path = [hit]
        while parents[path[-1]] is not None:
            path.append(parents[path[-1]][0])
        path.reverse()
        steps = []
        for prev, cur in zip(path, path[1:]):
            sym = parents[cur][1]
            steps.append(RunStep(prev[0], state(prev), sym, state(cur), cur[0]))
        if not steps:
            st = state(hit)
            steps.append(RunStep(hit[0], st, TOP_TEST, st, hit[0]))
        return tuple(steps)

    # -- oracle + consistency --------------------------------------------------

    def oracle(self, concept: str, ind: str, want_trace: bool = False):
        sat = self.saturation()
        return oracle_entails(
            self.tbox,
            self.abox,
            concept,
            ind,
            want_trace=want_trace,
            sat=sat,
            closer=self._sat_closer,
        )

    def oracle_inconsistent(self) -> bool:
        return self.saturation().inconsistent

    def automaton_inconsistent(self) -> bool:
        """Experimental: run the Bot automaton from every individual.

        Misses Bot assertions the TBox never mentions and individuals no
        licensed role path reaches; differential-tested against the oracle.
        """
        return any(
            self.collapsed(BOT, x, level=self.levels.max_level)
            for x in self.abox.individuals
        )


# ---------------------------------------------------------------------------
# Spec-level entry points
# ---------------------------------------------------------------------------


def eval_collapsed(tbox, heights, abox, concept, ind, want_witness=False):
    ev = Evaluator(tbox, abox, heights)
    answer = ev.collapsed(concept, ind)
    witness = ev.collapsed_witness(concept, ind) if (answer and want_witness) else None
    return answer, witness


def eval_naive(nfa: NestedNfa, abox, ind, want_witness=False):
    """Evaluate a built automaton over an ABox by product search."""
    ev = Evaluator(nfa.tbox, abox, nfa.family.heights)
    answer = ev.naive(nfa.for_concept, ind, nfa.include_weak)
    witness = (
        ev.naive_witness(nfa.for_concept, ind, nfa.include_weak)
        if (answer and want_witness)
        else None
    )
    return answer, witness


@dataclass
class IqResult:
    answer: bool
    witness: Optional[RunWitness]
    inconsistent: bool
    heights: dict
    diagnostics: dict = field(default_factory=dict)


def entails_iq(
    tbox_or_gcis,
    abox: AboxGraph,
    concept: str,
    ind: str,
    engine: str = "collapsed",
    consistency: str = "oracle",
    include_weak: bool = False,
    order: dict = None,
    want_witness: bool = False,
) -> IqResult:
    """The full pipeline: normalize, stratify, consistency pre-check, evaluate.

    `engine` is one of collapsed/naive/oracle; `consistency` is oracle (the
    default), automaton (experimental), or none.  A user `order` (name ->
    height) is verified instead of searching for one.
    """
    t0 = time.perf_counter()
    if isinstance(tbox_or_gcis, TBox):
        tbox = tbox_or_gcis
        fresh = {}
    else:
        tbox, fresh = normalize(tbox_or_gcis)
    if ind not in abox.asserted:
        raise KbError(f"unknown individual {ind!r}")
    if order is not None:
        violations = verify_preorder(tbox, order)
        if violations:
            raise NotStratifiedError(violations)
        heights = dict(order)
        notes = ()
    else:
        res = check_stratification(tbox)
        if not res.accepted:
            raise NotStratifiedError(res.violations)
        heights = res.height
        notes = res.notes
    ev = Evaluator(tbox, abox, heights)

    inconsistent = False
    if consistency == "oracle":
        inconsistent = ev.oracle_inconsistent()
    elif consistency == "automaton":
        inconsistent = ev.automaton_inconsistent()
    elif consistency != "none":
        raise KbError(f"unknown consistency check {consistency!r}")

    diagnostics = {
        "engine": engine,
        "consistency": consistency,
        "fresh_names": tuple(sorted(fresh)),
        "notes": notes,
        "level": ev.levels.height(concept),
    }
    if inconsistent:
        diagnostics["elapsed"] = time.perf_counter() - t0
        return IqResult(True, None, True, heights, diagnostics)

    witness = None
    if engine == "collapsed":
        answer = ev.collapsed(concept, ind)
        if answer and want_witness:
            witness = ev.collapsed_witness(concept, ind)
        diagnostics["visited"] = ev.collapsed_visited
    elif engine == "naive":
        answer = ev.naive(concept, ind, include_weak)
        if answer and want_witness:
            witness = ev.naive_witness(concept, ind, include_weak)
        diagnostics["visited"] = ev.naive_visited
    elif engine == "oracle":
        answer, _ = ev.oracle(concept, ind)
        diagnostics["visited"] = 0
    else:
        raise KbError(f"unknown engine {engine!r}")
    diagnostics["elapsed"] = time.perf_counter() - t0
    return IqResult(answer, witness, False, heights, diagnostics)


# ---------------------------------------------------------------------------
# Independent witness validation
# ---------------------------------------------------------------------------


def validate_witness(
    witness: RunWitness,
    abox: AboxGraph,
    start: str,
    nested_check: Callable[[str, str], bool] = None,
) -> None:
    """Replay a run witness against the run conditions; raises KbError.

    Checks: role steps follow ABox edges (two-way), concept tests keep the
    individual fixed and hold in the ABox read as an interpretation (Top
    everywhere, Bot only where asserted), nested tests pass `nested_check`,
    the first tuple starts at the query individual, consecutive tuples chain,
    and the final state accepts.
    """
    if not witness:
        raise KbError("empty witness")
    if witness[0].source != start:
        raise KbError(f"witness starts at {witness[0].source}, not {start}")
    for prev, cur in zip(witness, witness[1:]):
        if prev.target != cur.source or prev.next_state != cur.state:
            raise KbError("witness tuples do not chain")
    for st in witness:
        sym = st.symbol
        if isinstance(sym, RoleStep):
            if not abox.has_edge(st.source, sym.role, st.target):
                raise KbError(f"no ABox edge {sym.role}({st.source}, {st.target})")
        elif isinstance(sym, ConceptTest):
            if st.source != st.target:
                raise KbError("a test must not move")
            if sym.concept != TOP and sym.concept not in abox.asserted[st.source]:
                raise KbError(f"test {sym} fails at {st.source}")
        elif isinstance(sym, AutoTest):
            if st.source != st.target:
                raise KbError("a test must not move")
            if nested_check is None:
                raise KbError("witness uses a nested test but no checker was given")
            if not nested_check(sym.concept, st.source):
                raise KbError(f"nested test {sym} fails at {st.source}")
        else:
            raise KbError(f"unknown symbol {sym!r}")
    last = witness[-1].next_state
    if last.goal not in last.premise and BOT not in last.premise:
        raise KbError(f"final state {last.label()} is not accepting")
