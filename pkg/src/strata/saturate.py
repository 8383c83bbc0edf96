"""The trusted-but-slow semantics engine.

Entailment for these knowledge bases is forward rule application: concept
inclusions fire locally, existential heads spawn anonymous successors, and
existential bodies fire back across asserted edges and those successors.
This module computes it two ways:

* ``TypeCloser`` answers "which concept names follow for a single node with
  premise S" as a least fixpoint over contexts.  A context is either the
  root premise or an anonymous successor identified by its seed set; each
  context's type grows monotonically, and a worklist re-evaluates a context
  whenever a context it depends on grows.  Types are integer bit masks over
  the TBox concept signature.  When Bot enters a type, that type becomes the
  full signature (ex falso); global inconsistency is flagged separately.

* ``saturate_abox`` runs the same rules over a whole ABox, treating each
  individual's current label as the parent premise of its anonymous
  successors, and firing existential bodies across asserted role edges.

Both record, for every derived fact, the rule application that first produced
it, so a full derivation (a replayable sequence of single rule applications)
can be reconstructed for any entailed query over a consistent KB.  Inside the
anonymous part the records are kept per Kleene stage: a stage-k fact only
ever cites stage-(k-1) successor types, which keeps reconstruction
well-founded even when successor seeds repeat.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Dict, Optional

from .kb import (
    TOP,
    AboxGraph,
    ConjSub,
    ExLeft,
    ExRight,
    KbError,
    NormGci,
    Sub,
    TBox,
)

_TOP_BIT = 1  # 1 << bit_of[Top], fixed by TBox construction
_BOT_BIT = 2  # 1 << bit_of[Bot]

_STAGE_LIMIT = 10_000


class TypeCloser:
    """Entailed concepts of a single node, memoized per premise set."""

    def __init__(self, tbox: TBox, extra_flood_mask: int = 0):
        self.tbox = tbox
        self.flood_mask = tbox.signature_mask | _TOP_BIT | _BOT_BIT | extra_flood_mask
        self._vals: Dict[int, int] = {}
        self._rdeps: Dict[int, set] = {}
        self._stage_vals: Dict[tuple, int] = {}
        self._stage_justs: Dict[tuple, dict] = {}

    # -- public -----------------------------------------------------------

    def closure(self, names) -> frozenset:
        """All concept names entailed at a node asserted to satisfy `names`."""
        mask = self.closure_mask(self.tbox.mask_of(names))
        return self.tbox.names_of(mask)

    def closure_mask(self, mask: int) -> int:
        mask |= _TOP_BIT
        got = self._vals.get(mask)
        if got is not None:
            return got
        self._vals[mask] = self._local(mask, None)
        self._run_worklist([mask])
        return self._vals[mask]

    # -- fixpoint ---------------------------------------------------------

    def _run_worklist(self, roots):
        queue = deque(roots)
        queued = set(roots)
        fresh = []

        def dep(seed, user):
            v = self._vals.get(seed)
            if v is None:
                v = self._vals[seed] = self._local(seed, None)
                fresh.append(seed)
            self._rdeps.setdefault(seed, set()).add(user)
            return v

        while queue:
            m = queue.popleft()
            queued.discard(m)
            before = self._vals[m]
            after = self._local(before, lambda seed, m=m: dep(seed, m))
            for s in fresh:
                if s not in queued:
                    queue.append(s)
                    queued.add(s)
            fresh.clear()
            if after != before:
                self._vals[m] = after
                for d in self._rdeps.get(m, ()):
                    if d not in queued:
                        queue.append(d)
                        queued.add(d)
                # new value means new seeds of its own
                if m not in queued:
                    queue.append(m)
                    queued.add(m)

    def _local(self, cur: int, child_of) -> int:
        """Close `cur` under the rules; `child_of` supplies successor types."""
        tbox = self.tbox
        changed = True
        while changed:
            changed = False
            for lbit, rbit, _ in tbox.subs:
                if cur & lbit and not cur & rbit:
                    cur |= rbit
                    changed = True
            for lmask, rbit, _ in tbox.conjs:
                if cur & lmask == lmask and not cur & rbit:
                    cur |= rbit
                    changed = True
            if child_of is not None:
                for lbit, role, fbit, _ in tbox.exrights:
                    if not cur & lbit:
                        continue
                    seed = _TOP_BIT | fbit
                    for f2, r2, _ in tbox.exlefts_by_role.get(role.invert(), ()):
                        if cur & f2:
                            seed |= r2
                    child = child_of(seed)
                    add = _BOT_BIT if child & _BOT_BIT else 0
                    for f2, r2, _ in tbox.exlefts_by_role.get(role, ()):
                        if child & f2:
                            add |= r2
                    if add & ~cur:
                        cur |= add
                        changed = True
        if cur & _BOT_BIT:
            return self.flood_mask
        return cur

    # -- staged views (justifications / traces) -----------------------------

    def _stage_val(self, mask: int, k: int, build_justs: bool = False) -> int:
        """The context's type after k rounds of successor reasoning."""
        mask |= _TOP_BIT
        key = (mask, k)
        got = self._stage_vals.get(key)
        if got is not None and (not build_justs or key in self._stage_justs):
            return got
        justs = {}
        if k == 0:
            cur = mask
            if build_justs:
                b, pos = mask, 0
                while b:
                    if b & 1:
                        justs[1 << pos] = ("seed",)
                    b >>= 1
                    pos += 1
            cur = self._replay_local(cur, None, justs if build_justs else None, k)
        else:
            cur = self._stage_val(mask, k - 1, build_justs)
            if build_justs:
                justs = dict(self._stage_justs[(mask, k - 1)])
            cur = self._replay_local(
                cur,
                lambda seed: self._stage_val(seed, k - 1, build_justs),
                justs if build_justs else None,
                k,
            )
        self._stage_vals[key] = cur
        if build_justs:
            self._stage_justs[key] = justs
        return cur

    def _replay_local(self, cur, child_of, justs, stage):
        tbox = self.tbox
        changed = True
        while changed:
            changed = False
            for lbit, rbit, ax in tbox.subs:
                if cur & lbit and not cur & rbit:
                    cur |= rbit
                    if justs is not None:
                        justs[rbit] = ("sub", ax)
                    changed = True
            for lmask, rbit, ax in tbox.conjs:
                if cur & lmask == lmask and not cur & rbit:
                    cur |= rbit
                    if justs is not None:
                        justs[rbit] = ("conj", ax)
                    changed = True
            if child_of is not None:
                for lbit, role, fbit, exr in tbox.exrights:
                    if not cur & lbit:
                        continue
                    seed = _TOP_BIT | fbit
                    seed_pairs = []
                    for f2, r2, exl2 in tbox.exlefts_by_role.get(role.invert(), ()):
                        if cur & f2:
                            seed |= r2
                            seed_pairs.append((exl2, f2))
                    child = child_of(seed)
                    if child & _BOT_BIT and not cur & _BOT_BIT:
                        cur |= _BOT_BIT
                        if justs is not None:
                            justs[_BOT_BIT] = (
                                "anon_bot",
                                exr,
                                tuple(seed_pairs),
                                seed,
                                stage - 1,
                            )
                        changed = True
                    for f2, r2, exl in tbox.exlefts_by_role.get(role, ()):
                        if child & f2 and not cur & r2:
                            cur |= r2
                            if justs is not None:
                                justs[r2] = (
                                    "anon",
                                    exr,
                                    exl,
                                    tuple(seed_pairs),
                                    seed,
                                    stage - 1,
                                )
                            changed = True
        if cur & _BOT_BIT:
            if justs is not None:
                b, pos = self.flood_mask & ~cur, 0
                while b:
                    if b & 1:
                        justs.setdefault(1 << pos, ("exfalso",))
                    b >>= 1
                    pos += 1
            return self.flood_mask
        return cur

    def stable_stage(self, mask: int) -> int:
        """The smallest round count after which the context's type is final."""
        final = self.closure_mask(mask)
        k = 0
        while self._stage_val(mask, k) != final:
            k += 1
            if k > _STAGE_LIMIT:
                raise AssertionError("staged closure failed to stabilize")
        return k

    def justs_at(self, mask: int, stage: int) -> dict:
        """Per concept bit, the rule application deriving it by that stage."""
        self._stage_val(mask, stage, build_justs=True)
        return self._stage_justs[(mask | _TOP_BIT, stage)]


def type_closure(names, tbox: TBox, closer: TypeCloser = None) -> frozenset:
    """The concept names entailed for a single node asserted to satisfy S."""
    closer = closer or TypeCloser(tbox)
    return closer.closure(names)


# ---------------------------------------------------------------------------
# ABox saturation
# ---------------------------------------------------------------------------


@dataclass
class SatResult:
    tbox: TBox
    abox: AboxGraph
    labels: Dict[str, int]
    inconsistent: bool
    bot_at: Optional[str]
    justs: dict  # (ind, concept bit) -> rule application

    def entailed(self, ind: str) -> frozenset:
        names = set(self.tbox.names_of(self.labels[ind]))
        names.add(TOP)
        # concepts asserted outside the TBox signature are still entailed
        names.update(self.abox.asserted[ind])
        return frozenset(names)


def saturate_abox(tbox: TBox, abox: AboxGraph, closer: TypeCloser = None) -> SatResult:
    """Fixpoint labels for every individual, plus the consistency verdict."""
    closer = closer or TypeCloser(tbox)
    bit_of = tbox.bit_of
    labels = {}
    justs = {}
    for a in abox.individuals:
        m = _TOP_BIT
        for c in abox.asserted[a]:
            bit = bit_of.get(c)
            if bit is not None:
                m |= 1 << bit
                justs[(a, 1 << bit)] = ("init",)
        labels[a] = m

    queue = deque(abox.individuals)
    queued = set(queue)
    inconsistent = False
    bot_at = None

    while queue:
        a = queue.popleft()
        queued.discard(a)
        cur = labels[a]
        changed = True
        while changed:
            changed = False
            for lbit, rbit, ax in tbox.subs:
                if cur & lbit and not cur & rbit:
                    cur |= rbit
                    justs.setdefault((a, rbit), ("sub", ax))
                    changed = True
            for lmask, rbit, ax in tbox.conjs:
                if cur & lmask == lmask and not cur & rbit:
                    cur |= rbit
                    justs.setdefault((a, rbit), ("conj", ax))
                    changed = True
            for lbit, role, fbit, exr in tbox.exrights:
                if not cur & lbit:
                    continue
                seed = _TOP_BIT | fbit
                seed_pairs = []
                for f2, r2, exl2 in tbox.exlefts_by_role.get(role.invert(), ()):
                    if cur & f2:
                        seed |= r2
                        seed_pairs.append((exl2, f2))
                child = closer.closure_mask(seed)
                if child & _BOT_BIT and not cur & _BOT_BIT:
                    cur |= _BOT_BIT
                    justs.setdefault((a, _BOT_BIT), ("anon_bot", exr, tuple(seed_pairs), seed))
                    changed = True
                for f2, r2, exl in tbox.exlefts_by_role.get(role, ()):
                    if child & f2 and not cur & r2:
                        cur |= r2
                        justs.setdefault((a, r2), ("anon", exr, exl, tuple(seed_pairs), seed))
                        changed = True
        if cur & _BOT_BIT:
            if not inconsistent:
                inconsistent = True
                bot_at = a
            flood = closer.flood_mask
            b, pos = flood & ~cur, 0
            while b:
                if b & 1:
                    justs.setdefault((a, 1 << pos), ("exfalso",))
                b >>= 1
                pos += 1
            cur = flood
        labels[a] = cur
        # push existential bodies across asserted edges
        for role, fbit, rbit, exl in tbox.exlefts:
            if cur & fbit:
                for nb in abox.neighbors(a, role.invert()):
                    if not labels[nb] & rbit:
                        labels[nb] |= rbit
                        justs.setdefault((nb, rbit), ("edge", exl, a))
                        if rbit == _BOT_BIT and not inconsistent:
                            inconsistent = True
                            bot_at = nb
                        if nb not in queued:
                            queue.append(nb)
                            queued.add(nb)
    return SatResult(tbox, abox, labels, inconsistent, bot_at, justs)


# ---------------------------------------------------------------------------
# Oracle entailment with derivation traces
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DerivationStep:
    """One rule application: `axiom` fires for `subject`, adding `adds`.

    Assertions are ("concept", name, ind) or ("role", Role, a, b) tuples;
    `uses` lists the assertions the application consumed.
    """

    axiom: NormGci
    subject: str
    adds: tuple
    uses: tuple

    def __str__(self):
        from .kb import format_axiom

        def fmt(x):
            if x[0] == "concept":
                return f"{x[1]}({x[2]})"
            return f"{x[1]}({x[2]}, {x[3]})"

        added = ", ".join(fmt(x) for x in self.adds)
        used = ", ".join(fmt(x) for x in self.uses)
        src = f" using {used}" if used else ""
        return f"apply '{format_axiom(self.axiom)}' at {self.subject}: add {added}{src}"


class _TraceBuilder:
    def __init__(self, tbox, abox, sat, closer):
        self.tbox = tbox
        self.abox = abox
        self.sat = sat
        self.closer = closer
        self.steps = []
        self.have_c = set()
        self.have_ind = set(abox.individuals)
        self.counter = 0
        for a in abox.individuals:
            for c in abox.asserted[a]:
                self.have_c.add((c, a))

    def fresh_ind(self):
        while True:
            self.counter += 1
            name = f"n{self.counter}"
            if name not in self.have_ind:
                self.have_ind.add(name)
                return name

    def step(self, axiom, subject, adds, uses):
        self.steps.append(DerivationStep(axiom, subject, tuple(adds), tuple(uses)))
        for x in adds:
            if x[0] == "concept":
                self.have_c.add((x[1], x[2]))

    def ensure(self, c, node, ctx):
        """Derive concept c at `node`; ctx identifies where justs live."""
        if c == TOP or (c, node) in self.have_c:
            return
        bit = 1 << self.tbox.bit_of[c]
        if ctx[0] == "named":
            just = self.sat.justs[(node, bit)]
        else:
            _, seed, stage = ctx
            just = self.closer.justs_at(seed, stage)[bit]
        kind = just[0]
        if kind == "init":
            return
        if kind == "seed":
            raise AssertionError(f"seed concept {c} at {node} was not materialized")
        if kind in ("exfalso", "anon_bot"):
            raise KbError("derivation traces are only produced for consistent KBs")
        if kind == "sub":
            ax = just[1]
            self.ensure(ax.lhs, node, ctx)
            self.step(ax, node, [("concept", c, node)], [("concept", ax.lhs, node)])
        elif kind == "conj":
            ax = just[1]
            self.ensure(ax.lhs1, node, ctx)
            self.ensure(ax.lhs2, node, ctx)
            self.step(
                ax,
                node,
                [("concept", c, node)],
                [("concept", ax.lhs1, node), ("concept", ax.lhs2, node)],
            )
        elif kind == "edge":
            ax, nb = just[1], just[2]
            self.ensure(ax.filler, nb, ("named", nb))
            self.step(
                ax,
                node,
                [("concept", c, node)],
                [("role", ax.role, node, nb), ("concept", ax.filler, nb)],
            )
        elif kind == "anon":
            exr, exl, seed_pairs, seed = just[1], just[2], just[3], just[4]
            stage = just[5] if len(just) > 5 else self.closer.stable_stage(seed)
            child = self._spawn(exr, seed_pairs, node, ctx)
            self.ensure(exl.filler, child, ("anon", seed, stage))
            self.step(
                exl,
                node,
                [("concept", c, node)],
                [("role", exl.role, node, child), ("concept", exl.filler, child)],
            )
        else:
            raise AssertionError(f"unknown justification {just!r}")

    def _spawn(self, exr, seed_pairs, node, ctx):
        """Materialize the anonymous successor exr creates below `node`."""
        self.ensure(exr.lhs, node, ctx)
        child = self.fresh_ind()
        self.step(
            exr,
            node,
            [("role", exr.role, node, child), ("concept", exr.filler, child)],
            [("concept", exr.lhs, node)],
        )
        for exl2, _ in seed_pairs:
            self.ensure(exl2.filler, node, ctx)
            self.step(
                exl2,
                child,
                [("concept", exl2.rhs, child)],
                [("role", exl2.role, child, node), ("concept", exl2.filler, node)],
            )
        return child


def oracle_entails(
    tbox: TBox,
    abox: AboxGraph,
    concept: str,
    ind: str,
    want_trace: bool = False,
    sat: SatResult = None,
    closer: TypeCloser = None,
):
    """Entailment by saturation: true iff the query is derivable, or the KB
    is inconsistent (everything follows then).  Returns (answer, trace); the
    trace replays per ``replay_derivation`` and is produced only for
    consistent KBs."""
    if ind not in abox.asserted:
        raise KbError(f"unknown individual {ind!r}")
    if closer is None:
        closer = TypeCloser(tbox)
    if sat is None:
        sat = saturate_abox(tbox, abox, closer)
    if sat.inconsistent:
        return True, None
    if concept == TOP:
        return True, []
    bit = tbox.bit_of.get(concept)
    if bit is None:
        answer = concept in abox.asserted[ind]
    else:
        answer = bool(sat.labels[ind] & (1 << bit))
    if not answer or not want_trace:
        return answer, None
    if concept in abox.asserted[ind]:
        return True, []
    builder = _TraceBuilder(tbox, abox, sat, closer)
    builder.ensure(concept, ind, ("named", ind))
    return True, builder.steps


def replay_derivation(tbox: TBox, abox: AboxGraph, steps, concept: str, ind: str) -> bool:
    """Replay a derivation from the initial ABox, checking every step.

    Raises KbError on an invalid step; returns True when the final state
    contains the queried assertion.
    """
    have_c = {(TOP, a) for a in abox.individuals}
    known = set(abox.individuals)
    have_r = set()
    for a in abox.individuals:
        for c in abox.asserted[a]:
            have_c.add((c, a))
    for role, a, b in abox.role_asserts():
        have_r.add((role, a, b))
        have_r.add((role.invert(), b, a))

    def check_concept(c, a):
        if c == TOP:
            if a not in known:
                raise KbError(f"Top({a}) used but {a} never introduced")
            return
        if (c, a) not in have_c:
            raise KbError(f"step uses {c}({a}) before it is derived")

    for st in steps:
        ax = st.axiom
        if isinstance(ax, Sub):
            (kind, c, a), = st.adds
            check_concept(ax.lhs, a)
            if kind != "concept" or c != ax.rhs:
                raise KbError(f"step does not match its axiom: {st}")
            have_c.add((c, a))
        elif isinstance(ax, ConjSub):
            (kind, c, a), = st.adds
            check_concept(ax.lhs1, a)
            check_concept(ax.lhs2, a)
            if kind != "concept" or c != ax.rhs:
                raise KbError(f"step does not match its axiom: {st}")
            have_c.add((c, a))
        elif isinstance(ax, ExRight):
            (rk, role, a, b), (ck, c, b2) = st.adds
            if rk != "role" or ck != "concept" or role != ax.role or c != ax.filler or b2 != b:
                raise KbError(f"step does not match its axiom: {st}")
            check_concept(ax.lhs, a)
            if b in known:
                raise KbError(f"successor {b} is not fresh")
            known.add(b)
            have_r.add((role, a, b))
            have_r.add((role.invert(), b, a))
            have_c.add((c, b))
        elif isinstance(ax, ExLeft):
            (kind, c, a), = st.adds
            if kind != "concept" or c != ax.rhs:
                raise KbError(f"step does not match its axiom: {st}")
            witness = None
            for u in st.uses:
                if u[0] == "role" and u[1] == ax.role and u[2] == a:
                    if (u[1], u[2], u[3]) in have_r:
                        witness = u[3]
            if witness is None:
                raise KbError(f"no role edge supports {st}")
            check_concept(ax.filler, witness)
            have_c.add((c, a))
        else:
            raise KbError(f"unknown axiom in step: {st}")
    return (concept, ind) in have_c or concept == TOP
