"""``flagcurv`` command line: verify, dims, curvature, report.

Exit codes: 0 everything passed, 1 some check failed, 2 bad configuration or usage.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import grassmann, qmat
from .forms import curvature_closed_form, ricci_forms
from .harness import MODULES, ConfigError, SuiteConfig, dumps_report, emit_report, exit_code, run_suite

USAGE_ERROR = 2


def _tol(text: str) -> tuple[str, float]:
    name, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected NAME=VALUE, got {text!r}")
    try:
        return name.strip(), float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"tolerance {value!r} is not a number") from None


def _suite_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file with SuiteConfig fields")
    p.add_argument("--seed", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--fd-step", type=float, dest="fd_step")
    p.add_argument("--k-max", type=int, dest="k_max")
    p.add_argument("--n-max", type=int, dest="n_max")
    p.add_argument("--N-max", type=int, dest="N_max")
    p.add_argument("--tol", type=_tol, action="append", default=[], metavar="NAME=VALUE")
    p.add_argument("--jobs", type=int, default=1, help="run checks on this many threads")
    p.add_argument("--timing", action="store_true", help="record duration_ms (makes reports non-reproducible)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="flagcurv", description="Curvature of quaternionic flag manifolds: verification suite.")
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run the checks of one module or all")
    v.add_argument("module", choices=[*MODULES, "all"])
    v.add_argument("--json", action="store_true", help="print the JSON report instead of a table")
    _suite_options(v)

    r = sub.add_parser("report", help="run all checks and write a JSON report")
    r.add_argument("--out", required=True)
    r.add_argument("--module", default="all", choices=[*MODULES, "all"])
    _suite_options(r)

    d = sub.add_parser("dims", help="dimension bookkeeping for the (k, n) Grassmannian")
    d.add_argument("k", type=int)
    d.add_argument("n", type=int)
    d.add_argument("--json", action="store_true")

    c = sub.add_parser("curvature", help="closed-form curvature and Ricci forms of a seeded instance")
    c.add_argument("--k", type=int, required=True)
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--json", action="store_true")
    return parser


def _config(args) -> SuiteConfig:
    base = SuiteConfig.from_file(args.config) if args.config else SuiteConfig()
    tols = dict(args.tol)
    return base.override(
        seed=args.seed,
        trials=args.trials,
        fd_step=args.fd_step,
        k_max=args.k_max,
        n_max=args.n_max,
        N_max=args.N_max,
        tolerances=tols or None,
    )


def _table(results) -> str:
    width = max((len(r.name) for r in results), default=4)
    lines = [f"{r.name:<{width}}  {r.status.upper():5}  residual={r.max_residual:.3e}  tol={r.tolerance:.1e}  trials={r.trials}" for r in results]
    n_pass = sum(r.status == "pass" for r in results)
    lines.append(f"{n_pass}/{len(results)} checks passed")
    return "\n".join(lines)


def _cmd_verify(args) -> int:
    cfg = _config(args)
    results = run_suite(args.module, cfg, jobs=args.jobs, timing=args.timing)
    print(dumps_report(results, cfg) if args.json else _table(results), end="" if args.json else "\n")
    return exit_code(results)


def _cmd_report(args) -> int:
    cfg = _config(args)
    results = run_suite(args.module, cfg, jobs=args.jobs, timing=args.timing)
    code = emit_report(results, args.out, cfg)
    print(f"wrote {args.out}: {sum(r.status == 'pass' for r in results)}/{len(results)} passed")
    return code


def _cmd_dims(args) -> int:
    d = grassmann.dimensions(args.k, args.n)
    out = {"k": args.k, "n": args.n, "dim_Y": d.dim_Y, "dim_X": d.dim_X, "dim_fiber": d.dim_fiber, "dim_group": qmat.sp_dimension(args.k + args.n)}
    if args.json:
        print(json.dumps(out))
    else:
        for key, value in out.items():
            print(f"{key:10} {value}")
    return 0


def _qmat_lists(m: qmat.QMatrix) -> list:
    return np.round(m.data, 12).tolist()


def _cmd_curvature(args) -> int:
    k, n = args.k, args.n
    if k < 1 or n < 1 or k + n > 8:
        raise ConfigError("need k, n >= 1 and k + n <= 8")
    g = grassmann.BlockedGroupElement.split(qmat.random_sp(k + n, [args.seed, 0]), k)
    y = grassmann.chart_point(g)
    u, v = qmat.random_tangent(k, n, [args.seed, 1]), qmat.random_tangent(k, n, [args.seed, 2])
    om1, om2 = curvature_closed_form(g, y, u, v)
    r1, r2 = ricci_forms(y, u, v)
    out = {
        "k": k,
        "n": n,
        "seed": args.seed,
        "Omega1": _qmat_lists(om1.value),
        "Omega2": _qmat_lists(om2.value),
        "R1": list(r1.as_array()),
        "R2": list(r2.as_array()),
    }
    if args.json:
        print(json.dumps(out))
    else:
        np.set_printoptions(precision=6, suppress=True)
        print(f"seeded instance k={k} n={n} seed={args.seed}; entries are (1, i, j, k) components")
        print("Omega1 =", om1.value.data, sep="\n")
        print("Omega2 =", om2.value.data, sep="\n")
        print("R1 =", r1.as_array())
        print("R2 =", r2.as_array())
    return 0


COMMANDS = {"verify": _cmd_verify, "report": _cmd_report, "dims": _cmd_dims, "curvature": _cmd_curvature}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE_ERROR if exc.code else 0
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, ValueError) as exc:
        print(f"flagcurv: error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except OSError as exc:
        print(f"flagcurv: error: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
