"""Stratification analysis: forced order constraints, the decision procedure,
user-order verification, height computation, and TBox level restriction.

A TBox is stratified when some preorder on its concept and role names
satisfies, per axiom shape:

  * ``A <= B``                    A below B.
  * ``A & B <= C``                A and B below C, at least one strictly.
  * ``A <= exists s . D``         A below the role; A below D unless D is Top;
                                  D below the role as well, so the axiom is
                                  already available at the levels that read
                                  the role back.
  * ``exists s . D <= B``         role below D and D strictly below B, unless
                                  D is B itself or Top; with a Top filler the
                                  role sits below B instead.
  * roles and their inverses are interchangeable (one shared vertex).

Axioms with Bot on the right carry no constraint, and Top/Bot never take part
in the order (their height is pinned to 0).

Heights are the pointwise-least solution of the induced difference
constraints, so the computed nesting depth for the rewriting is minimal.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .kb import (
    BOT,
    TOP,
    ConjSub,
    ExLeft,
    ExRight,
    KbError,
    NormGci,
    Sub,
    TBox,
    format_axiom,
)


@dataclass(frozen=True)
class MustStrict:
    lo: str
    hi: str
    axiom: NormGci


@dataclass(frozen=True)
class AtLeastOne:
    first: Tuple[str, str]
    second: Tuple[str, str]
    axiom: NormGci


@dataclass
class ForcedConstraints:
    edges: frozenset  # ordered (lo, hi) pairs over concept names and role vertices
    edge_axioms: dict  # (lo, hi) -> witnessing axiom (first one seen)
    strict: tuple  # MustStrict / AtLeastOne, in axiom order
    notes: tuple = ()


@dataclass(frozen=True)
class Violation:
    kind: str
    axiom: Optional[NormGci]
    message: str

    def __str__(self):
        return self.message


@dataclass
class StratResult:
    accepted: bool
    scc_of: Dict[str, int]
    height: Dict[str, int]
    violations: List[Violation]
    notes: Tuple[str, ...] = ()


def forced_constraints(tbox: TBox) -> ForcedConstraints:
    """The order constraints every admissible preorder must contain."""
    edges = {}
    strict = []
    notes = set()

    def edge(lo, hi, ax):
        if lo in (TOP, BOT) or hi in (TOP, BOT):
            return
        if (lo, hi) not in edges:
            edges[(lo, hi)] = ax

    for ax in tbox.axioms:
        if isinstance(ax, Sub):
            if ax.rhs == BOT:
                continue
            edge(ax.lhs, ax.rhs, ax)
        elif isinstance(ax, ConjSub):
            if ax.rhs == BOT:
                continue
            edge(ax.lhs1, ax.rhs, ax)
            edge(ax.lhs2, ax.rhs, ax)
            strict.append(AtLeastOne((ax.lhs1, ax.rhs), (ax.lhs2, ax.rhs), ax))
        elif isinstance(ax, ExRight):
            edge(ax.lhs, ax.role.name, ax)
            edge(ax.lhs, ax.filler, ax)
            # The head's level is its role's level: every existential body
            # consuming the role sits at or above it, so the spawning axiom
            # stays visible wherever its successors are read back.
            edge(ax.filler, ax.role.name, ax)
        elif isinstance(ax, ExLeft):
            if ax.rhs in (BOT, TOP):
                continue
            if ax.filler == TOP:
                # A Top filler bounds nothing by itself; keeping the role
                # below the right-hand side keeps the axiom inside the level
                # the rewriting for the right-hand side is built from.
                edge(ax.role.name, ax.rhs, ax)
                notes.add(
                    "existential premises with a Top filler constrain the "
                    "role below the right-hand side"
                )
            elif ax.filler == ax.rhs:
                edge(ax.role.name, ax.filler, ax)
            else:
                edge(ax.role.name, ax.filler, ax)
                edge(ax.filler, ax.rhs, ax)
                strict.append(MustStrict(ax.filler, ax.rhs, ax))
        else:
            raise KbError(f"not a normal-form axiom: {ax!r}")
    return ForcedConstraints(
        frozenset(edges), edges, tuple(strict), tuple(sorted(notes))
    )


def _sccs(vertices, succ):
    """Iterative Tarjan; returns scc id per vertex, ids in topological order."""
    index = {}
    lowlink = {}
    on_stack = set()
    stack = []
    scc_of = {}
    sccs = []
    counter = [0]

    for root in vertices:
        if root in index:
            continue
        work = [(root, iter(succ.get(root, ())))]
        index[root] = lowlink[root] = counter[0]
        counter[0] += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = lowlink[w] = counter[0]
                    counter[0] += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(succ.get(w, ()))))
                    advanced = True
                    break
                if w in on_stack:
                    lowlink[v] = min(lowlink[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[v])
            if lowlink[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                sccs.append(comp)
    # Tarjan emits components in reverse topological order.
    sccs.reverse()
    for i, comp in enumerate(sccs):
        for v in comp:
            scc_of[v] = i
    return scc_of, sccs


def _cycle_path(lo, hi, succ):
    """A path hi -> ... -> lo in the edge graph (exists when both share an SCC)."""
    frontier = [hi]
    parent = {hi: None}
    while frontier:
        nxt = []
        for v in frontier:
            for w in succ.get(v, ()):
                if w not in parent:
                    parent[w] = v
                    if w == lo:
                        path = [w]
                        while parent[path[-1]] is not None:
                            path.append(parent[path[-1]])
                        return list(reversed(path))
                    nxt.append(w)
        frontier = nxt
    return [hi, lo]


def _least_heights(vertices, fc: ForcedConstraints, cap: int):
    """Pointwise-least heights satisfying the forced constraints, or None."""
    h = {v: 0 for v in vertices}
    edges = sorted(fc.edges)
    musts = [c for c in fc.strict if isinstance(c, MustStrict)]
    disj = [c for c in fc.strict if isinstance(c, AtLeastOne)]
    for _ in range(cap + 2):
        changed = False
        for lo, hi in edges:
            if h[hi] < h[lo]:
                h[hi] = h[lo]
                changed = True
        for c in musts:
            need = h[c.lo] + 1
            if h[c.hi] < need:
                h[c.hi] = need
                changed = True
        for c in disj:
            (x1, y), (x2, _) = c.first, c.second
            need = min(h[x1], h[x2]) + 1
            if h[y] < need:
                h[y] = need
                changed = True
        if not changed:
            return h
        if max(h.values(), default=0) > cap:
            return None
    return None


def check_stratification(tbox: TBox) -> StratResult:
    """Decide whether any admissible preorder exists; report minimal heights.

    The reflexive-transitive closure of the forced edges is the smallest
    candidate preorder, and growing a preorder can only lose strictness, so a
    strict requirement that fails there fails everywhere.  Heights are the
    least solution of the constraint system, hence pointwise below any
    user-verified height map.
    """
    fc = forced_constraints(tbox)
    vertices = sorted(set(tbox.concept_names) | set(tbox.role_names))
    succ = {}
    for lo, hi in sorted(fc.edges):
        succ.setdefault(lo, []).append(hi)
    scc_of, sccs = _sccs(vertices, succ)

    violations = []
    for c in fc.strict:
        if isinstance(c, MustStrict):
            if scc_of[c.lo] == scc_of[c.hi]:
                cyc = _cycle_path(c.lo, c.hi, succ)
                chain = " <= ".join([f"{c.lo}", *cyc])
                violations.append(
                    Violation(
                        "strict",
                        c.axiom,
                        f"axiom '{format_axiom(c.axiom)}' needs {c.lo} strictly below "
                        f"{c.hi}, but the axioms force the cycle {chain}",
                    )
                )
        else:
            (x1, y1), (x2, y2) = c.first, c.second
            if scc_of[x1] == scc_of[y1] and scc_of[x2] == scc_of[y2]:
                violations.append(
                    Violation(
                        "at-least-one",
                        c.axiom,
                        f"axiom '{format_axiom(c.axiom)}' needs {x1} or {x2} strictly "
                        f"below {y1}, but both are forced into its cycle",
                    )
                )

    accepted = not violations
    if accepted:
        heights = _least_heights(vertices, fc, cap=len(vertices) + 1)
        if heights is None:  # cannot happen when the SCC check passed
            raise AssertionError("height fixpoint diverged on an accepted TBox")
    else:
        # Best-effort heights for reporting: longest path over the condensation.
        heights = {}
        scc_height = [0] * len(sccs)
        for i, comp in enumerate(sccs):
            for v in comp:
                for w in succ.get(v, ()):
                    j = scc_of[w]
                    if j != i:
                        scc_height[j] = max(scc_height[j], scc_height[i] + 1)
        for v in vertices:
            heights[v] = scc_height[scc_of[v]]
    return StratResult(accepted, scc_of, heights, violations, fc.notes)


def verify_preorder(tbox: TBox, heights: Dict[str, int]) -> List[Violation]:
    """Check the stratification conditions against a user height map.

    The map induces the total preorder ``x <= y iff h(x) <= h(y)``.  Returns
    the violated clauses (empty means the map is admissible).  A partial or
    negative map is an input error, not a violation.
    """
    vertices = set(tbox.concept_names) | set(tbox.role_names)
    missing = sorted(v for v in vertices if v not in heights)
    if missing:
        raise KbError(f"height map is missing {missing}")
    bad = sorted((v, h) for v, h in heights.items() if h < 0)
    if bad:
        raise KbError(f"negative heights: {bad}")
    for pinned in (TOP, BOT):
        if heights.get(pinned, 0) != 0:
            raise KbError(f"the height of {pinned} is fixed at 0")

    def h(name):
        if name in (TOP, BOT):
            return 0
        return heights[name]

    violations = []

    def bad_clause(ax, msg):
        violations.append(Violation("order", ax, f"axiom '{format_axiom(ax)}': {msg}"))

    for ax in tbox.axioms:
        if isinstance(ax, Sub):
            if ax.rhs in (BOT, TOP) or ax.lhs == TOP:
                continue
            if h(ax.lhs) > h(ax.rhs):
                bad_clause(ax, f"{ax.lhs} must lie below {ax.rhs}")
        elif isinstance(ax, ConjSub):
            if ax.rhs == BOT:
                continue
            if h(ax.lhs1) > h(ax.rhs):
                bad_clause(ax, f"{ax.lhs1} must lie below {ax.rhs}")
            if h(ax.lhs2) > h(ax.rhs):
                bad_clause(ax, f"{ax.lhs2} must lie below {ax.rhs}")
            if min(h(ax.lhs1), h(ax.lhs2)) >= h(ax.rhs):
                bad_clause(ax, f"{ax.lhs1} or {ax.lhs2} must lie strictly below {ax.rhs}")
        elif isinstance(ax, ExRight):
            if ax.filler != TOP and h(ax.filler) > h(ax.role.name):
                bad_clause(ax, f"{ax.filler} must lie below the role {ax.role.name}")
            if ax.lhs == TOP:
                continue
            if h(ax.lhs) > h(ax.role.name):
                bad_clause(ax, f"{ax.lhs} must lie below the role {ax.role.name}")
            if ax.filler != TOP and h(ax.lhs) > h(ax.filler):
                bad_clause(ax, f"{ax.lhs} must lie below {ax.filler}")
        elif isinstance(ax, ExLeft):
            if ax.rhs in (BOT, TOP):
                continue
            if ax.filler == TOP:
                if h(ax.role.name) > h(ax.rhs):
                    bad_clause(ax, f"the role {ax.role.name} must lie below {ax.rhs}")
            else:
                if h(ax.role.name) > h(ax.filler):
                    bad_clause(ax, f"the role {ax.role.name} must lie below {ax.filler}")
                if ax.filler != ax.rhs and h(ax.filler) >= h(ax.rhs):
                    bad_clause(ax, f"{ax.filler} must lie strictly below {ax.rhs}")
        else:
            raise KbError(f"not a normal-form axiom: {ax!r}")
    return violations


def axiom_level(ax: NormGci, heights: Dict[str, int]) -> int:
    """The height level an axiom lives at: the max height of its names."""
    cnames, rnames = _names_of(ax)
    level = 0
    for n in cnames:
        if n not in (TOP, BOT):
            level = max(level, heights.get(n, 0))
    for n in rnames:
        level = max(level, heights.get(n, 0))
    return level


def _names_of(ax):
    from .kb import axiom_names

    return axiom_names(ax)


def restrict(tbox: TBox, heights: Dict[str, int], n: int) -> TBox:
    """The sub-TBox of axioms whose every name has height at most n.

    ``restrict(T, h, -1)`` is the empty TBox.  The result shares the parent's
    concept-bit indexing so masks stay comparable across levels.
    """
    axioms = [ax for ax in tbox.axioms if axiom_level(ax, heights) <= n]
    return TBox(axioms, share_index_with=tbox)


class LevelMap:
    """Per-level views of a stratified TBox: restrictions, concept masks.

    ``con(T|n)`` is taken as the TBox concept names of height at most n
    (plus Top, plus Bot when Bot occurs at that level): a name of low height
    may occur only inside higher-level axioms, yet its tests must already be
    available to the low-level automata.
    """

    def __init__(self, tbox: TBox, heights: Dict[str, int]):
        self.tbox = tbox
        self.heights = heights
        self.max_level = 0
        for ax in tbox.axioms:
            self.max_level = max(self.max_level, axiom_level(ax, heights))
        self._tbox_at = {}
        self._con_mask = {}
        by_height = sorted(tbox.concept_names, key=lambda c: (heights.get(c, 0), c))
        self._concepts_by_height = tuple(by_height)

    def height(self, name: str) -> int:
        if name in (TOP, BOT):
            return 0
        return self.heights.get(name, 0)

    def tbox_at(self, n: int) -> TBox:
        n = min(n, self.max_level)
        if n not in self._tbox_at:
            self._tbox_at[n] = restrict(self.tbox, self.heights, n)
        return self._tbox_at[n]

    def con_mask(self, n: int) -> int:
        """Bit mask of con(T|n): names of height <= n, Top, Bot-if-present."""
        key = min(n, self.max_level)
        if key in self._con_mask:
            return self._con_mask[key]
        if n < 0:
            mask = self.tbox.top_bit
        else:
            mask = self.tbox.top_bit
            for c in self._concepts_by_height:
                if self.heights.get(c, 0) <= n:
                    mask |= 1 << self.tbox.bit_of[c]
            if self.tbox_at(n).bot_occurs:
                mask |= self.tbox.bot_bit
        self._con_mask[key] = mask
        return mask

    def concepts_at(self, n: int):
        """Concept names of height <= n (no Top/Bot), lowest first."""
        return tuple(c for c in self._concepts_by_height if self.heights.get(c, 0) <= n)
