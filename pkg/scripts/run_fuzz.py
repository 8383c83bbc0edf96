#!/usr/bin/env python3
"""Differential-fuzz sweep: engine agreement across KB size classes.

Each row generates `--cases` random stratified KBs of the given size class,
answers every instance query with the collapsed engine, the faithful product
search (with and without premise weakening), and the saturation oracle, and
validates every witness.  Any disagreement is printed verbatim.
"""

import argparse
import sys
import time

from strata import run_fuzz

SIZE_CLASSES = [
    # (label, concepts, roles, individuals, gcis)
    ("tiny", 3, 2, 4, 6),
    ("default", 6, 3, 10, 12),
    ("dense", 4, 2, 5, 14),
    ("wide", 6, 3, 16, 10),
]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--cases", type=int, default=500)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--jobs", type=int, default=2)
    args = ap.parse_args(argv)

    print(f"{'class':>10} {'cases':>7} {'queries':>9} {'witnesses':>10} {'bad':>4} {'secs':>7}")
    worst = 0
    for label, ncon, nrol, ninds, ngcis in SIZE_CLASSES:
        t0 = time.perf_counter()
        rep = run_fuzz(
            args.cases,
            args.seed,
            jobs=args.jobs,
            check_weak=True,
            validate_witnesses=True,
            max_concepts=ncon,
            max_roles=nrol,
            max_individuals=ninds,
            max_gcis=ngcis,
        )
        dt = time.perf_counter() - t0
        print(
            f"{label:>10} {rep.cases:>7} {rep.queries:>9} {rep.witnesses_checked:>10} "
            f"{len(rep.failures):>4} {dt:>7.2f}"
        )
        for f in rep.failures[:2]:
            print(f"disagreement: case {f.case} query {f.concept}({f.ind}): {f.answers}")
            print(f.kb_text)
        worst = max(worst, len(rep.failures))
    return 1 if worst else 0


if __name__ == "__main__":
    sys.exit(main())
