"""Independent test oracles: a bounded naive chase, brute-force preorder
search, and generators for arbitrary (not necessarily stratified)
normal-form TBoxes.  These deliberately re-derive semantics from first
principles rather than reusing the library's fixpoint machinery.
"""

from __future__ import annotations

import itertools
from random import Random

from strata import (
    BOT,
    TOP,
    AboxGraph,
    ConjSub,
    ExLeft,
    ExRight,
    Role,
    Sub,
    TBox,
)


def chase(tbox: TBox, abox: AboxGraph, max_depth: int, node_cap: int = 60000):
    """Breadth-first forward chaining with real anonymous successors.

    Each existential head fires at most once per node; anonymous depth is
    truncated at `max_depth`.  Returns ({node: label set}, inconsistent,
    capped) where `capped` reports whether the node budget stopped growth.
    """
    labels = {a: {TOP} | set(abox.asserted[a]) for a in abox.individuals}
    depth = {a: 0 for a in abox.individuals}
    adj = {}

    def connect(a, role, b):
        adj.setdefault((a, role), set()).add(b)
        adj.setdefault((b, role.invert()), set()).add(a)

    for role, a, b in abox.role_asserts():
        connect(a, role, b)
    spawned = set()
    counter = [0]
    capped = False

    changed = True
    while changed:
        changed = False
        for ax in tbox.axioms:
            if isinstance(ax, Sub):
                for node, lab in labels.items():
                    if (ax.lhs == TOP or ax.lhs in lab) and ax.rhs not in lab:
                        lab.add(ax.rhs)
                        changed = True
            elif isinstance(ax, ConjSub):
                for node, lab in labels.items():
                    if ax.lhs1 in lab and ax.lhs2 in lab and ax.rhs not in lab:
                        lab.add(ax.rhs)
                        changed = True
            elif isinstance(ax, ExLeft):
                for node in list(labels):
                    if ax.rhs in labels[node]:
                        continue
                    for nb in adj.get((node, ax.role), ()):
                        if ax.filler == TOP or ax.filler in labels[nb]:
                            labels[node].add(ax.rhs)
                            changed = True
                            break
            else:  # ExRight
                for node in list(labels):
                    if ax.lhs != TOP and ax.lhs not in labels[node]:
                        continue
                    if (node, ax) in spawned or depth[node] >= max_depth:
                        continue
                    if len(labels) >= node_cap:
                        capped = True
                        continue
                    spawned.add((node, ax))
                    counter[0] += 1
                    child = ("anon", counter[0])
                    labels[child] = {TOP, ax.filler}
                    depth[child] = depth[node] + 1
                    connect(node, ax.role, child)
                    changed = True
    inconsistent = any(BOT in lab for lab in labels.values())
    return labels, inconsistent, capped


def order_admits(tbox: TBox, h) -> bool:
    """Direct check of the stratification clauses against a height map."""

    def g(name):
        return 0 if name in (TOP, BOT) else h[name]

    for ax in tbox.axioms:
        if isinstance(ax, Sub):
            if ax.rhs in (BOT, TOP) or ax.lhs == TOP:
                continue
            if g(ax.lhs) > g(ax.rhs):
                return False
        elif isinstance(ax, ConjSub):
            if ax.rhs == BOT:
                continue
            if g(ax.lhs1) > g(ax.rhs) or g(ax.lhs2) > g(ax.rhs):
                return False
            if min(g(ax.lhs1), g(ax.lhs2)) >= g(ax.rhs):
                return False
        elif isinstance(ax, ExRight):
            if ax.filler != TOP and g(ax.filler) > g(ax.role.name):
                return False
            if ax.lhs == TOP:
                continue
            if g(ax.lhs) > g(ax.role.name):
                return False
            if ax.filler != TOP and g(ax.lhs) > g(ax.filler):
                return False
        elif isinstance(ax, ExLeft):
            if ax.rhs in (BOT, TOP):
                continue
            if ax.filler == TOP:
                if g(ax.role.name) > g(ax.rhs):
                    return False
            else:
                if g(ax.role.name) > g(ax.filler):
                    return False
                if ax.filler != ax.rhs and g(ax.filler) >= g(ax.rhs):
                    return False
    return True


def bruteforce_stratified(tbox: TBox) -> bool:
    """Does any height map admit the TBox?  Total preorders are enough:
    heights read off any admissible preorder are admissible themselves, and
    a strict chain never repeats a name, so values below the vertex count
    suffice."""
    vertices = sorted(set(tbox.concept_names) | set(tbox.role_names))
    if not vertices:
        return True
    for values in itertools.product(range(len(vertices)), repeat=len(vertices)):
        if order_admits(tbox, dict(zip(vertices, values))):
            return True
    return False


def bruteforce_min_heights(tbox: TBox):
    """Pointwise minimum over all admissible height maps (None if none)."""
    vertices = sorted(set(tbox.concept_names) | set(tbox.role_names))
    best = None
    for values in itertools.product(range(max(1, len(vertices))), repeat=len(vertices)):
        h = dict(zip(vertices, values))
        if order_admits(tbox, h):
            if best is None:
                best = dict(h)
            else:
                for v in vertices:
                    best[v] = min(best[v], h[v])
    return best


def random_normal_tbox(rng: Random, max_concepts: int = 3, max_roles: int = 2, max_gcis: int = 8) -> TBox:
    """An arbitrary normal-form TBox; stratified or not."""
    names = ["A", "B", "C", "D", "E"][: rng.randint(1, max_concepts)]
    roles = ["r", "s"][: rng.randint(1, max_roles)]
    axioms = []
    for _ in range(rng.randint(1, max_gcis)):
        shape = rng.randrange(4)
        role = Role(rng.choice(roles), rng.random() < 0.4)
        if shape == 0:
            lhs = TOP if rng.random() < 0.1 else rng.choice(names)
            rhs = BOT if rng.random() < 0.1 else rng.choice(names)
            axioms.append(Sub(lhs, rhs))
        elif shape == 1:
            rhs = BOT if rng.random() < 0.1 else rng.choice(names)
            axioms.append(ConjSub(rng.choice(names), rng.choice(names), rhs))
        elif shape == 2:
            lhs = TOP if rng.random() < 0.1 else rng.choice(names)
            filler = TOP if rng.random() < 0.3 else rng.choice(names)
            axioms.append(ExRight(lhs, role, filler))
        else:
            filler = TOP if rng.random() < 0.3 else rng.choice(names)
            rhs = BOT if rng.random() < 0.1 else rng.choice(names)
            axioms.append(ExLeft(role, filler, rhs))
    return TBox(axioms)


def random_abox(rng: Random, names, roles, max_individuals: int = 4) -> AboxGraph:
    inds = [f"b{i}" for i in range(rng.randint(1, max_individuals))]
    concept_asserts = []
    for a in inds:
        for _ in range(rng.randint(0, 2)):
            concept_asserts.append((rng.choice(names), a))
    role_asserts = []
    for _ in range(rng.randint(0, 2 * len(inds))):
        role_asserts.append(
            (Role(rng.choice(roles), rng.random() < 0.3), rng.choice(inds), rng.choice(inds))
        )
    return AboxGraph(concept_asserts, role_asserts, inds)
