"""Exact residual of every commutation relation of the differential-operator
realization, for each (k, n) requested.

    python scripts/commutator_table.py 1 1 1 2 --random 5
"""

import argparse
import time

from flagcurv import liealg


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("kn", type=int, nargs="*", default=[1, 1, 1, 2], help="pairs k n k n ...")
    ap.add_argument("--degree", type=int, default=2)
    ap.add_argument("--random", type=int, default=20, help="seeded degree-3 test polynomials")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--rank", action="store_true", help="also compute the generated-algebra rank")
    args = ap.parse_args()
    if len(args.kn) % 2:
        ap.error("give (k, n) as pairs of integers")

    for k, n in zip(args.kn[::2], args.kn[1::2]):
        t0 = time.perf_counter()
        rep = liealg.full_table_check(k, n, degree=args.degree, n_random=args.random, seed=args.seed)
        print(f"(k, n) = ({k}, {n})  {'ok' if rep.ok else 'FAILED'}  [{time.perf_counter() - t0:.1f}s]")
        for name, res in sorted(rep.residuals.items()):
            print(f"  {name:<28} {res}")
        print(f"  {'symmetric form':<28} {rep.symmetric_form_residual}")
        if args.rank:
            j = k + n
            print(f"  rank {liealg.generated_rank(k, n)} (expected {j * (2 * j + 1)})")


if __name__ == "__main__":
    main()
