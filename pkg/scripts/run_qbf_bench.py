#!/usr/bin/env python3
"""QBF benchmark sweep: reduction answers versus brute-force validity.

For each (n, m) cell the table reports how many generated formulas were
valid, whether every reduction answer matched, and the end-to-end pipeline
time (normalization, stratification check, consistency pre-check, collapsed
evaluation).
"""

import argparse
import sys
import time

from strata import entails_iq, qbf_to_kb, qbf_valid_bruteforce, random_qbf, verify_preorder


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=50)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--max-n", type=int, default=4)
    ap.add_argument("--max-m", type=int, default=4)
    args = ap.parse_args(argv)

    print(f"{'n':>3} {'m':>3} {'count':>6} {'valid':>6} {'mismatch':>9} {'secs':>8}")
    bad = 0
    for n in range(1, args.max_n + 1):
        for m in range(1, args.max_m + 1):
            t0 = time.perf_counter()
            valid = mismatch = 0
            for i in range(args.count):
                formula = random_qbf(args.seed + 7919 * n + 31 * m + i, n, m)
                gen = qbf_to_kb(formula)
                if verify_preorder(gen.tbox, gen.heights):
                    mismatch += 1
                    continue
                want = qbf_valid_bruteforce(formula)
                got = entails_iq(gen.tbox, gen.abox, gen.query[0], gen.query[1]).answer
                valid += want
                mismatch += got != want
            dt = time.perf_counter() - t0
            print(f"{n:>3} {m:>3} {args.count:>6} {valid:>6} {mismatch:>9} {dt:>8.2f}")
            bad += mismatch
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
