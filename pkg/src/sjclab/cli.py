"""Command-line entry point: ``sjc <suite> [flags]``.

Writes ``report.json`` (and suite-specific CSV files) into ``--out-dir``
and exits nonzero when any check fails.  Bad configuration exits with
status 2.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import suites


def _write_outputs(report: dict, csvs: dict[str, list[str]], out_dir: str) -> None:
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "report.json"), "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    for name, rows in csvs.items():
        with open(os.path.join(out_dir, name), "w") as fh:
            fh.write("\n".join(rows) + "\n")


def _print_report(report: dict) -> None:
    for check in report["checks"]:
        status = "PASS" if check["passed"] else "FAIL"
        extra = "" if check["value"] is None else f" (value={check['value']})"
        print(f"[{status}] {check['name']}{extra}")
    print(f"suite {report['suite']}: {'PASS' if report['passed'] else 'FAIL'}")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="sjc",
        description="Verification suites for the super J-holomorphic curve laboratory",
    )
    ap.add_argument("--out-dir", default=None, help="directory for report.json and CSV outputs")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out-dir", default=argparse.SUPPRESS, dest="out_dir")
    sub = ap.add_subparsers(dest="suite", required=True, parser_class=lambda **kw: argparse.ArgumentParser(parents=[common], **kw))

    p = sub.add_parser("flat", help="flat-model first-order system checks")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--trials", type=int, default=100)

    p = sub.add_parser("identities", help="exact algebraic identity checks")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--energy-trials", type=int, default=20)

    p = sub.add_parser("index", help="kernel/cokernel/index numerics")
    p.add_argument("--surface", choices=["sphere", "torus"], default="sphere")
    p.add_argument("--degree", type=int, default=1)
    p.add_argument("--cutoff", type=int, default=8)
    p.add_argument("--target-rank", type=int, default=1)
    p.add_argument("--threshold", type=float, default=1e-8)

    p = sub.add_parser("bochner", help="curvature-positivity classification and gaps")
    p.add_argument("--cutoff", type=int, default=10)
    p.add_argument("--seed", type=int, default=7)

    p = sub.add_parser("moduli", help="moduli dimension calculator")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--genus", type=int, default=0)
    p.add_argument("--c1a", type=int, default=3)
    p.add_argument("--dimx", type=int, default=0)

    p = sub.add_parser("linearize", help="finite-difference linearization blocks")
    p.add_argument("--grid", type=int, default=32)
    p.add_argument("--model", choices=["flat", "constant-hsc"], default="flat")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--step", type=float, default=1e-3)

    p = sub.add_parser("verify-flat", help="check a superfield literal file")
    p.add_argument("path")

    p = sub.add_parser("verify-components", help="check a component-field bundle")
    p.add_argument("path")
    p.add_argument("--tol", type=float, default=1e-8)

    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    out_dir = args.out_dir or "."
    csvs: dict[str, list[str]] = {}
    try:
        if args.suite == "flat":
            report = suites.suite_flat(seed=args.seed, trials=args.trials)
        elif args.suite == "identities":
            report = suites.suite_identities(
                seed=args.seed, trials=args.trials, energy_trials=args.energy_trials
            )
        elif args.suite == "index":
            report, csvs = suites.suite_index(
                surface=args.surface,
                degree=args.degree,
                cutoff=args.cutoff,
                target_rank=args.target_rank,
                threshold=args.threshold,
            )
        elif args.suite == "bochner":
            report, csvs = suites.suite_bochner(cutoff=args.cutoff, seed=args.seed)
        elif args.suite == "moduli":
            report = suites.suite_moduli(
                n=args.n, genus=args.genus, c1a=args.c1a, dimx=args.dimx
            )
        elif args.suite == "linearize":
            report = suites.suite_linearize(
                M=args.grid, model_kind=args.model, seed=args.seed, h=args.step
            )
        elif args.suite == "verify-flat":
            report = suites.suite_verify_flat(args.path)
        elif args.suite == "verify-components":
            report, csvs = suites.suite_verify_components(args.path, tol=args.tol)
        else:  # pragma: no cover
            raise ValueError(f"unknown suite {args.suite}")
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    _write_outputs(report, csvs, out_dir)
    _print_report(report)
    return 0 if report["passed"] else 1


if __name__ == "__main__":
    sys.exit(main())
