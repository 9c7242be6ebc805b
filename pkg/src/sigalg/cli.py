"""Command-line front end.

Every command writes one JSON report (sorted keys, fixed indentation) to
``--out`` or stdout.  Wall-clock timings go to stderr so the report bytes
depend only on the input, the flags and the seed.

Exit codes: 0 pass, 1 check failure, 2 input error, 3 capacity.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from .errors import CapacityError, SigalgError
from .paths import random_path, read_csv, signature, write_csv
from .rtree import HeightedPoset, certify
from .sigsig import MAX_DIM
from .suites import ORACLE_TOL, hmap_checks, lemma_checks
from .tensor_algebra import check_capacity

SCHEMA_VERSION = 1

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_CAPACITY = 0, 1, 2, 3


def _config(args: argparse.Namespace) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "out")}


def _report(args, result: dict, ok: bool) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": args.command,
        "config": _config(args),
        "pass": bool(ok),
        "result": result,
    }


def cmd_sig(args) -> tuple[dict, bool]:
    x = read_csv(args.input)
    check_capacity(x.dim, args.level)
    g = signature(x, args.level)
    return g.to_json() | {"collapsed_rows": x.collapsed}, True


def cmd_check(args) -> tuple[dict, bool]:
    x = read_csv(args.input)
    check_capacity(x.dim, args.level)
    checks = lemma_checks(x, args.level, args.tol, np.random.default_rng(args.seed))
    return checks, all(c["pass"] for c in checks.values())


def cmd_hmap(args) -> tuple[dict, bool]:
    x = read_csv(args.input)
    tol = ORACLE_TOL if args.tol is None else args.tol
    result = hmap_checks(x, args.level, args.depth, args.quad, oracle_tol=tol)
    ok = all(row["pass"] for row in result["profiles"]) and result["group_like"]["pass"]
    return result, ok


def cmd_tree_check(args) -> tuple[dict, bool]:
    report = certify(HeightedPoset.load(args.input))
    return report.to_json(), report.certified


def cmd_fuzz(args) -> tuple[dict, bool]:
    rng = np.random.default_rng(args.seed)
    if args.emit:
        os.makedirs(args.emit, exist_ok=True)
    runs = []
    for k in range(args.count):
        dim = args.dim if args.dim is not None else int(rng.integers(1, MAX_DIM + 1))
        x = random_path(rng, dim)
        checks = lemma_checks(x, args.level, args.tol, rng)
        if args.emit:
            write_csv(x, os.path.join(args.emit, f"path_{k:04d}.csv"))
        runs.append(
            {
                "index": k,
                "dim": dim,
                "segments": len(x.times) - 1,
                "pass": all(c["pass"] for c in checks.values()),
                "residuals": {name: c["residual"] for name, c in checks.items()},
            }
        )
    worst = {name: max(r["residuals"][name] for r in runs) for name in runs[0]["residuals"]} if runs else {}
    failures = [r["index"] for r in runs if not r["pass"]]
    return {"runs": runs, "worst": worst, "failures": failures}, not failures


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sigalg", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, level, tol):
        p.add_argument("--level", "-N", type=int, default=level, help="truncation level")
        p.add_argument("--tol", type=float, default=tol, help="pass/fail tolerance")
        p.add_argument("--refine", type=int, default=8, help="grid refinement for variation computations")
        p.add_argument("--quad", type=int, default=64, help="quadrature panels per segment")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", "-o", help="write the JSON report here instead of stdout")

    p = sub.add_parser("sig", help="signature of a CSV path")
    p.add_argument("input")
    common(p, 3, 1e-9)
    p.set_defaults(func=cmd_sig)

    p = sub.add_parser("check", help="norm, pushforward, reversal and reparametrization identities")
    p.add_argument("input")
    common(p, 4, 1e-9)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("hmap", help="ordered-shuffle map against quadrature, Chen and group-likeness")
    p.add_argument("input")
    common(p, 2, None)
    p.add_argument("--depth", "-n", type=int, default=2, help="outer signature depth n")
    p.set_defaults(func=cmd_hmap)

    p = sub.add_parser("tree-check", help="certify a heighted poset JSON file as an R-tree")
    p.add_argument("input")
    common(p, 1, 0.0)
    p.set_defaults(func=cmd_tree_check)

    p = sub.add_parser("fuzz", help="run the identity checks on seeded random paths")
    common(p, 3, 1e-9)
    p.add_argument("--count", type=int, default=20)
    p.add_argument("--dim", type=int, default=None, help="path dimension (random in 1..3 if omitted)")
    p.add_argument("--emit", help="directory to write the generated paths as CSV")
    p.set_defaults(func=cmd_fuzz)
    return parser


def _validate(args) -> None:
    if args.level < 1:
        raise SigalgError(f"--level must be >= 1, got {args.level}")
    if args.tol is not None and args.tol < 0:
        raise SigalgError(f"--tol must be non-negative, got {args.tol}")
    if args.quad < 1 or args.refine < 1:
        raise SigalgError("--quad and --refine must be positive")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    try:
        _validate(args)
        result, ok = args.func(args)
    except CapacityError as exc:
        print(f"sigalg: capacity: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (SigalgError, ValueError, OSError) as exc:
        print(f"sigalg: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    text = json.dumps(_report(args, result, ok), sort_keys=True, indent=2) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    print(f"sigalg {args.command}: {time.perf_counter() - start:.3f} s", file=sys.stderr)
    return EXIT_OK if ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
