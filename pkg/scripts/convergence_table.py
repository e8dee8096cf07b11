"""Finite-difference convergence of the structure-equation residual and the
electromagnetic split, as a plain-text table.

    python scripts/convergence_table.py --seed 3 --steps 4e-3 2e-3 1e-3 5e-4
"""

import argparse

import numpy as np

from flagcurv import forms, lorentz
from flagcurv.checks import MC2_PARTITIONS, random_patch, smooth_potential


def mc2_rows(seed, steps):
    for N, parts in MC2_PARTITIONS.items():
        for j, p in enumerate(parts):
            patch, part = random_patch(N, [seed + j, N]), forms.Partition(p)
            yield f"N={N} {p}", [forms.mc2_residual(patch, part, h) for h in steps]


def em_row(seed, steps):
    point = np.random.default_rng([seed, 0]).uniform(-1, 1, 4)

    def vec(h):
        f = lorentz.em_decompose(smooth_potential, point, h)
        return np.concatenate([[f.f], f.E, f.B])

    # no closed form for this potential, so errors are successive differences
    vals = [vec(h) for h in steps]
    return "em (successive)", [float(np.linalg.norm(a - b)) for a, b in zip(vals, vals[1:])]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--steps", type=float, nargs="+", default=[4e-3, 2e-3, 1e-3, 5e-4])
    args = ap.parse_args()
    steps = sorted(args.steps, reverse=True)

    print(f"{'case':<20}" + "".join(f"{h:>12.1e}" for h in steps) + "   ratios")
    rows = list(mc2_rows(args.seed, steps)) + [em_row(args.seed, steps)]
    for label, errs in rows:
        ratios = [a / b for a, b in zip(errs, errs[1:]) if b > 0]
        cells = "".join(f"{e:>12.3e}" for e in errs)
        pad = " " * 12 * (len(steps) - len(errs))
        print(f"{label:<20}{cells}{pad}   " + " ".join(f"{r:.3f}" for r in ratios))


if __name__ == "__main__":
    main()
