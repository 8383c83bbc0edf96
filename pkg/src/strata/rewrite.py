"""Construction of the nested query automaton for a concept name.

For a stratified TBox and a concept name A of height n, ``build_automaton``
yields a nested two-way NFA whose accepting runs over a bare ABox (read as an
interpretation) coincide with entailment of A at the start individual.

States are (premise, goal) pairs: the premise is the set of concept names
already known to hold at the current node, the goal is the single concept
still to be established there.  A state accepts when the goal sits in the
premise, or Bot does.  Transitions come from seven schemas:

  weak   drop part of the premise                 (Top? test; off by default)
  data   read an asserted concept into the premise (B? test)
  sbus   replace the goal along an inclusion axiom (Top? test)
  succ   move to a role successor to prove an existential body (role step)
  anon   swap the goal for one that locally entails it, courtesy of the
         TBox's anonymous models (Top? test)
  noc    peel one conjunct off a conjunction axiom whose other conjunct is
         already in the premise (Top? test)
  aut    delegate a strictly lower concept to its own nested automaton

The full state space is exponential in the premise component, so states and
transitions materialize lazily; ``states``/``transitions`` force the
reachable fragment, which is all the exports need.  Weak transitions add
nothing to evaluation (every guard is monotone in the premise) and are
excluded unless asked for.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Tuple, Union

from .kb import BOT, TOP, ConjSub, ExLeft, KbError, Role, Sub, TBox
from .saturate import TypeCloser
from .stratify import LevelMap, check_stratification


@dataclass(frozen=True)
class AutState:
    premise: frozenset
    goal: str

    def label(self) -> str:
        inner = ",".join(sorted(self.premise))
        return f"{{{inner}}} / {self.goal}"


@dataclass(frozen=True)
class RoleStep:
    role: Role

    def __str__(self):
        return str(self.role)


@dataclass(frozen=True)
class ConceptTest:
    concept: str

    def __str__(self):
        return f"{self.concept}?"


@dataclass(frozen=True)
class AutoTest:
    concept: str

    def __str__(self):
        return f"aut[{self.concept}]?"


AutSymbol = Union[RoleStep, ConceptTest, AutoTest]

TOP_TEST = ConceptTest(TOP)


class _Family:
    """Shared construction context: one automaton per concept name."""

    def __init__(self, tbox: TBox, heights: dict, include_weak: bool):
        self.tbox = tbox
        self.heights = heights
        self.include_weak = include_weak
        self.levels = LevelMap(tbox, heights)
        self._closers: Dict[int, TypeCloser] = {}
        self._nfas: Dict[Tuple[str, int], "NestedNfa"] = {}

    def closer_at(self, n: int) -> TypeCloser:
        n = min(n, self.levels.max_level)
        if n not in self._closers:
            self._closers[n] = TypeCloser(
                self.levels.tbox_at(n), extra_flood_mask=self.levels.con_mask(n)
            )
        return self._closers[n]

    def automaton(self, concept: str, level: int = None) -> "NestedNfa":
        if level is None:
            level = self.levels.height(concept)
        key = (concept, level)
        if key not in self._nfas:
            self._nfas[key] = NestedNfa(self, concept, level)
        return self._nfas[key]


class NestedNfa:
    """The rewriting automaton for one concept name (lazily materialized)."""

    def __init__(self, family: _Family, concept: str, level: int):
        self.family = family
        self.for_concept = concept
        self.level = level
        self.include_weak = family.include_weak
        self.tbox = family.tbox
        self.level_tbox = family.levels.tbox_at(level)
        self.con_mask = family.levels.con_mask(level)
        self.closer = family.closer_at(level)
        self.initial = AutState(frozenset({TOP}), concept)
        # alphabet pieces
        cons = [TOP]
        cons += list(family.levels.concepts_at(level))
        if self.level_tbox.bot_occurs:
            cons.append(BOT)
        self.con_names = tuple(cons)
        self.lower_names = family.levels.concepts_at(level - 1)
        self._states = None
        self._transitions = None

    @property
    def weak_included(self) -> bool:
        return self.include_weak

    def nested(self, concept: str) -> "NestedNfa":
        if self.family.levels.height(concept) >= self.level:
            raise KbError(f"no nested automaton for {concept} at level {self.level}")
        return self.family.automaton(concept)

    def is_accepting(self, state: AutState) -> bool:
        return state.goal in state.premise or BOT in state.premise

    def successors(self, state: AutState):
        """All licensed transitions out of `state`, in schema order."""
        out = []
        premise, goal = state.premise, state.goal
        if self.include_weak:
            rest = sorted(premise - {TOP})
            for mask in range(1 << len(rest)):
                kept = frozenset(
                    [TOP] + [c for i, c in enumerate(rest) if mask >> i & 1]
                )
                out.append((TOP_TEST, AutState(kept, goal)))
        for b in self.con_names:
            out.append((ConceptTest(b), AutState(premise | {b}, goal)))
        for ax in self.level_tbox.by_rhs(goal):
            if isinstance(ax, Sub):
                out.append((TOP_TEST, AutState(premise, ax.lhs)))
            elif isinstance(ax, ExLeft):
                out.append((RoleStep(ax.role), AutState(frozenset({TOP}), ax.filler)))
            elif isinstance(ax, ConjSub):
                if ax.lhs1 in premise:
                    out.append((TOP_TEST, AutState(premise, ax.lhs2)))
                if ax.lhs2 in premise:
                    out.append((TOP_TEST, AutState(premise, ax.lhs1)))
        goal_bit = self.tbox.bit_of.get(goal)
        if goal_bit is not None:
            gmask = 1 << goal_bit
            pmask = self.tbox.mask_of(premise)
            for b in self.con_names:
                if b == TOP and premise != {TOP}:
                    continue  # a premise-member swap subsumes the Top swap
                if self.closer.closure_mask(pmask | self.tbox.mask_of([b])) & gmask:
                    out.append((TOP_TEST, AutState(premise, b)))
        for b in self.lower_names:
            out.append((AutoTest(b), AutState(premise | {b}, goal)))
        # collapse duplicate instances licensed by several schemas
        seen = set()
        uniq = []
        for sym, st in out:
            if (sym, st) not in seen:
                seen.add((sym, st))
                uniq.append((sym, st))
        return uniq

    def materialize(self):
        if self._states is not None:
            return
        frontier = [self.initial]
        seen = {self.initial}
        order = [self.initial]
        transitions = []
        while frontier:
            nxt = []
            for st in frontier:
                for sym, dst in self.successors(st):
                    transitions.append((st, sym, dst))
                    if dst not in seen:
                        seen.add(dst)
                        order.append(dst)
                        nxt.append(dst)
            frontier = nxt
        self._states = tuple(order)
        self._transitions = tuple(transitions)

    @property
    def states(self):
        self.materialize()
        return self._states

    @property
    def transitions(self):
        self.materialize()
        return self._transitions

    @property
    def accepting_states(self):
        return tuple(s for s in self.states if self.is_accepting(s))

    def __repr__(self):
        return f"NestedNfa({self.for_concept}, level={self.level})"


def build_automaton(
    tbox: TBox,
    heights: dict = None,
    concept: str = None,
    include_weak: bool = False,
    level: int = None,
) -> NestedNfa:
    """Build the rewriting automaton for `concept` at its height level.

    `heights` must come from an accepted stratification check or a verified
    user order; when omitted it is computed here (raising if the TBox is not
    stratified).  Querying a name the TBox never mentions is allowed: it is
    adjoined to the signature at height 0, where only its own assertion can
    prove it.  `level` overrides the automaton's level; the consistency
    checker uses this to run the Bot automaton over the whole TBox.
    """
    if concept is None:
        raise KbError("build_automaton needs a concept name")
    if heights is None:
        res = check_stratification(tbox)
        if not res.accepted:
            raise KbError("TBox is not stratified")
        heights = res.height
    if concept not in (TOP, BOT) and concept not in tbox.bit_of:
        tbox = TBox(tbox.axioms, extra_concepts=(concept,))
        heights = dict(heights)
        heights.setdefault(concept, 0)
    family = _Family(tbox, heights, include_weak)
    return family.automaton(concept, level)


# ---------------------------------------------------------------------------
# Export
# ---------------------------------------------------------------------------


def _family_members(nfa: NestedNfa):
    """The automaton and every nested automaton its reachable part tests."""
    seen = {}
    stack = [nfa]
    while stack:
        cur = stack.pop()
        if cur.for_concept in seen:
            continue
        seen[cur.for_concept] = cur
        used = set()
        for _, sym, _dst in cur.transitions:
            if isinstance(sym, AutoTest):
                used.add(sym.concept)
        for b in sorted(used):
            stack.append(cur.nested(b))
    root_first = [nfa]
    for name in sorted(seen):
        if seen[name] is not nfa:
            root_first.append(seen[name])
    return root_first


def _alphabet_lines(nfa: NestedNfa):
    parts = [f"{c}?" for c in sorted(nfa.con_names)]
    for r in sorted(nfa.level_tbox.role_names):
        parts.append(r)
        parts.append(f"inv {r}")
    parts += [f"aut[{c}]?" for c in nfa.lower_names]
    return " ".join(parts)


def export_automaton(nfa: NestedNfa, fmt: str = "text") -> str:
    """Deterministic text or dot rendering of the reachable fragment."""
    if fmt == "text":
        chunks = []
        for member in _family_members(nfa):
            states = member.states
            index = {s: i for i, s in enumerate(states)}
            lines = [
                f"automaton: {member.for_concept}",
                f"level: {member.level}",
                f"alphabet: {_alphabet_lines(member)}",
                f"states: {len(states)}",
            ]
            for i, s in enumerate(states):
                lines.append(f"state {i}: {s.label()}")
            lines.append("initial: 0")
            acc = " ".join(str(index[s]) for s in member.accepting_states)
            lines.append(f"accepting: {acc}")
            for src, sym, dst in sorted(
                member.transitions, key=lambda t: (index[t[0]], str(t[1]), index[t[2]])
            ):
                lines.append(f"transition: {index[src]} {sym} {index[dst]}")
            chunks.append("\n".join(lines))
        return "\n\n".join(chunks) + "\n"
    if fmt == "dot":
        lines = ["digraph rewriting {", "  rankdir=LR;", '  node [shape=circle];']
        for member in _family_members(nfa):
            states = member.states
            index = {s: i for i, s in enumerate(states)}
            name = member.for_concept
            lines.append(f'  subgraph "cluster_{name}" {{')
            lines.append(f'    label="automaton {name} (level {member.level})";')
            for i, s in enumerate(states):
                shape = ' peripheries=2' if member.is_accepting(s) else ""
                lines.append(f'    "{name}.{i}" [label="{s.label()}"{shape}];')
            grouped = {}
            for src, sym, dst in member.transitions:
                grouped.setdefault((index[src], index[dst]), []).append(str(sym))
            for (i, j), syms in sorted(grouped.items()):
                label = ", ".join(sorted(set(syms)))
                lines.append(f'    "{name}.{i}" -> "{name}.{j}" [label="{label}"];')
            lines.append("  }")
        lines.append("}")
        return "\n".join(lines) + "\n"
    raise KbError(f"unknown export format {fmt!r}")
