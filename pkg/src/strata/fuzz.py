"""Randomized differential testing: generated stratified KBs, engine agreement.

The generator draws a random height map first and only emits axioms the map
admits, so every generated TBox is stratified by construction (the checker
re-verifies it as a free cross-check).  The harness then runs every
(concept, individual) instance query through the collapsed engine, the
faithful product search (optionally with and without premise weakening), and
the saturation oracle, all behind the same consistency pre-check, and
reports any disagreement with a reproducible case seed and the offending KB
verbatim.
"""

from __future__ import annotations

import multiprocessing
from dataclasses import dataclass
from random import Random
from typing import List, Tuple

from .evaluate import Evaluator, validate_witness
from .kb import (
    BOT,
    TOP,
    AboxGraph,
    And,
    ConjSub,
    ExLeft,
    ExRight,
    Exists,
    Gci,
    KbError,
    Role,
    Sub,
    TBox,
    format_kb,
    kb_from_normal,
)
from .stratify import check_stratification

_CONCEPT_POOL = ("A", "B", "C", "D", "E", "F")
_ROLE_POOL = ("r", "s", "t")


def random_stratified_kb(
    rng: Random,
    max_concepts: int = 6,
    max_roles: int = 3,
    max_individuals: int = 10,
    max_gcis: int = 12,
) -> Tuple[TBox, AboxGraph]:
    """A random normal-form TBox admitted by a random height map, plus an ABox."""
    names = list(_CONCEPT_POOL[: rng.randint(1, max_concepts)])
    roles = list(_ROLE_POOL[: rng.randint(1, max_roles)])
    h = {v: rng.randint(0, 3) for v in names + roles}

    def pick_below(bound, pool, strict=False):
        ok = [v for v in pool if (h[v] < bound if strict else h[v] <= bound)]
        return rng.choice(ok) if ok else None

    axioms = []
    target = rng.randint(1, max_gcis)
    for _ in range(target * 6):
        if len(axioms) >= target:
            break
        shape = rng.choices(
            ("sub", "conj", "exr", "exl", "bot"), weights=(25, 20, 20, 25, 10)
        )[0]
        if shape == "sub":
            rhs = rng.choice(names)
            if rng.random() < 0.1:
                axioms.append(Sub(TOP, rhs))
                continue
            lhs = pick_below(h[rhs], names)
            axioms.append(Sub(lhs, rhs))
        elif shape == "conj":
            rhs = rng.choice(names)
            strict = pick_below(h[rhs], names, strict=True)
            if strict is None:
                continue
            other = pick_below(h[rhs], names)
            pair = [strict, other]
            rng.shuffle(pair)
            axioms.append(ConjSub(pair[0], pair[1], rhs))
        elif shape == "exr":
            lhs = TOP if rng.random() < 0.1 else rng.choice(names)
            lo = 0 if lhs == TOP else h[lhs]
            ok_roles = [r for r in roles if h[r] >= lo]
            if not ok_roles:
                continue
            role = rng.choice(ok_roles)
            if rng.random() < 0.3:
                filler = TOP
            else:
                ok_fill = [c for c in names if lo <= h[c] <= h[role]]
                if not ok_fill:
                    continue
                filler = rng.choice(ok_fill)
            axioms.append(ExRight(lhs, Role(role, rng.random() < 0.4), filler))
        elif shape == "exl":
            rhs = rng.choice(names)
            kind = rng.random()
            if kind < 0.3:
                role = pick_below(h[rhs], roles)
                if role is None:
                    continue
                filler = TOP
            elif kind < 0.5:
                role = pick_below(h[rhs], roles)
                if role is None:
                    continue
                filler = rhs
            else:
                filler = pick_below(h[rhs], names, strict=True)
                if filler is None:
                    continue
                role = pick_below(h[filler], roles)
                if role is None:
                    continue
            axioms.append(ExLeft(Role(role, rng.random() < 0.4), filler, rhs))
        else:  # an axiom with Bot on the right: unconstrained by the order
            which = rng.random()
            if which < 0.4:
                axioms.append(Sub(rng.choice(names), BOT))
            elif which < 0.7:
                axioms.append(ConjSub(rng.choice(names), rng.choice(names), BOT))
            else:
                axioms.append(
                    ExLeft(
                        Role(rng.choice(roles), rng.random() < 0.4),
                        TOP if rng.random() < 0.3 else rng.choice(names),
                        BOT,
                    )
                )
    if not axioms:
        axioms.append(Sub(names[0], names[0]))
    tbox = TBox(axioms)

    ninds = rng.randint(1, max_individuals)
    inds = [f"a{i}" for i in range(ninds)]
    concept_asserts = []
    for a in inds:
        for _ in range(rng.randint(0, 2)):
            concept_asserts.append((rng.choice(names), a))
    if rng.random() < 0.04:
        concept_asserts.append((BOT, rng.choice(inds)))
    role_asserts = []
    for _ in range(rng.randint(0, 2 * ninds)):
        role_asserts.append(
            (
                Role(rng.choice(roles), rng.random() < 0.3),
                rng.choice(inds),
                rng.choice(inds),
            )
        )
    abox = AboxGraph(concept_asserts, role_asserts, inds)
    return tbox, abox


def random_dllite_tbox(rng: Random, max_names: int = 10):
    """Random core DL-Lite surface axioms: basic concepts are names or
    unqualified existentials; inclusions plus disjointness."""
    n_con = rng.randint(1, max(1, max_names - 2))
    names = [f"A{i}" for i in range(n_con)]
    roles = [f"p{i}" for i in range(rng.randint(1, max(1, max_names - n_con)))]

    def basic():
        kind = rng.random()
        if kind < 0.5:
            return rng.choice(names)
        return Exists(Role(rng.choice(roles), rng.random() < 0.5), TOP)

    gcis = []
    for _ in range(rng.randint(1, 2 * max_names)):
        if rng.random() < 0.3:
            gcis.append(Gci(And(basic(), basic()), BOT))
        else:
            gcis.append(Gci(basic(), basic()))
    return gcis


@dataclass
class FuzzFailure:
    case: int
    seed: int
    concept: str
    ind: str
    answers: dict
    kb_text: str


@dataclass
class FuzzReport:
    cases: int
    queries: int
    failures: List[FuzzFailure]
    witnesses_checked: int = 0

    @property
    def ok(self) -> bool:
        return not self.failures


def _case_seed(seed: int, index: int) -> int:
    return (seed * 1_000_003 + index) & 0x7FFFFFFF


def run_case(
    case: int,
    case_seed: int,
    check_weak: bool = True,
    validate_witnesses: bool = False,
    max_concepts: int = 6,
    max_roles: int = 3,
    max_individuals: int = 10,
    max_gcis: int = 12,
):
    """One differential case; returns (query count, failures, witness count)."""
    rng = Random(case_seed)
    tbox, abox = random_stratified_kb(
        rng, max_concepts, max_roles, max_individuals, max_gcis
    )
    failures = []
    witnesses = 0

    def kb_text():
        return format_kb(kb_from_normal(tbox, abox))

    res = check_stratification(tbox)
    if not res.accepted:
        failures.append(
            FuzzFailure(case, case_seed, "-", "-", {"checker": "rejected"}, kb_text())
        )
        return 0, failures, witnesses
    ev = Evaluator(tbox, abox, res.height)
    inconsistent = ev.oracle_inconsistent()
    queries = 0
    oracle_check = lambda c, x: ev.oracle(c, x)[0]
    for concept in tbox.concept_names:
        for ind in abox.individuals:
            queries += 1
            if inconsistent:
                continue  # the shared pre-check answers true for every engine
            answers = {
                "collapsed": ev.collapsed(concept, ind),
                "naive": ev.naive(concept, ind),
                "oracle": ev.oracle(concept, ind)[0],
            }
            if check_weak:
                answers["naive_weak"] = ev.naive(concept, ind, include_weak=True)
            if len(set(answers.values())) != 1:
                failures.append(
                    FuzzFailure(case, case_seed, concept, ind, answers, kb_text())
                )
                continue
            if validate_witnesses and answers["collapsed"]:
                try:
                    validate_witness(
                        ev.collapsed_witness(concept, ind), abox, ind, oracle_check
                    )
                    validate_witness(
                        ev.naive_witness(concept, ind), abox, ind, oracle_check
                    )
                except KbError as exc:
                    failures.append(
                        FuzzFailure(
                            case, case_seed, concept, ind, {"witness": str(exc)}, kb_text()
                        )
                    )
                    continue
                witnesses += 2
    return queries, failures, witnesses


def _pool_case(args):
    case, case_seed, check_weak, validate_witnesses, limits = args
    return case, run_case(case, case_seed, check_weak, validate_witnesses, *limits)


def run_fuzz(
    cases: int,
    seed: int,
    jobs: int = 1,
    check_weak: bool = True,
    validate_witnesses: bool = False,
    max_concepts: int = 6,
    max_roles: int = 3,
    max_individuals: int = 10,
    max_gcis: int = 12,
) -> FuzzReport:
    """Run `cases` differential cases; deterministic for a fixed seed."""
    limits = (max_concepts, max_roles, max_individuals, max_gcis)
    work = [
        (i, _case_seed(seed, i), check_weak, validate_witnesses, limits)
        for i in range(cases)
    ]
    total_q = 0
    failures = []
    witnesses = 0
    if jobs > 1:
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(jobs) as pool:
            results = pool.map(_pool_case, work, chunksize=max(1, cases // (8 * jobs)))
        results.sort(key=lambda r: r[0])
        for _, (q, fails, wit) in results:
            total_q += q
            failures.extend(fails)
            witnesses += wit
    else:
        for args in work:
            _, (q, fails, wit) = _pool_case(args)
            total_q += q
            failures.extend(fails)
            witnesses += wit
    failures.sort(key=lambda f: (f.case, f.concept, f.ind))
    return FuzzReport(cases, total_q, failures, witnesses)
