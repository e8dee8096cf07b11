"""Run the full check suite at several seeds and write one JSON report per seed.

    python scripts/run_report.py --seeds 0 1 2 --out reports/
"""

import argparse
import sys
from pathlib import Path

from flagcurv.harness import SuiteConfig, emit_report, run_suite


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, nargs="+", default=[0])
    ap.add_argument("--out", type=Path, default=Path("reports"))
    ap.add_argument("--module", default="all")
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    worst = 0
    for seed in args.seeds:
        cfg = SuiteConfig(seed=seed)
        results = run_suite(args.module, cfg)
        code = emit_report(results, args.out / f"report_seed{seed}.json", cfg)
        bad = [r.name for r in results if r.status != "pass"]
        print(f"seed {seed}: {len(results) - len(bad)}/{len(results)} passed" + (f"  failing: {', '.join(bad)}" if bad else ""))
        worst = max(worst, code)
    return worst


if __name__ == "__main__":
    sys.exit(main())
