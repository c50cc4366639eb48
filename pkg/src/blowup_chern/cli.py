"""Command line front end: ``blowup-chern compute | sweep | profile``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .cech import profile
from .errors import BlowupChernError
from .laurent import validate_bundle
from .report import SweepConfig, compute, reports_to_csv, reports_to_table, sweep, sweep_to_json

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_CERTIFICATION = 3
EXIT_BOUNDS = 4


def _non_negative_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blowup-chern",
        description="Local second Chern class jump of a rank-2 bundle across a blow-up.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--format", choices=("json", "csv", "table"), default="json")
        p.add_argument("--out", type=Path, help="write output to this file instead of stdout")
        p.add_argument("--timings", action="store_true", help="include per-stage wall-clock times (JSON only)")

    c = sub.add_parser("compute", help="invariants of one bundle")
    c.add_argument("--j", type=_non_negative_int, required=True)
    c.add_argument("--p", default="0", help='polynomial in z, z^-1, u such as "u - 2*z*u^2"')
    common(c)

    s = sub.add_parser("sweep", help="invariants of seeded random bundles")
    s.add_argument("--j", type=_non_negative_int, required=True)
    s.add_argument("--samples", type=_non_negative_int, default=50)
    s.add_argument("--seed", type=_non_negative_int, default=0)
    s.add_argument("--coeff-min", type=int, default=-5)
    s.add_argument("--coeff-max", type=int, default=5)
    s.add_argument("--density", type=float, default=0.5)
    s.add_argument("--jobs", type=_non_negative_int, default=1)
    common(s)

    pr = sub.add_parser("profile", help="h0 / h1 tower of the thickenings")
    pr.add_argument("--j", type=_non_negative_int, required=True)
    pr.add_argument("--p", default="0")
    pr.add_argument("--n-max", type=_non_negative_int, default=None, help="last level (default j + 2)")
    pr.add_argument("--format", choices=("json", "csv", "table"), default="table")
    pr.add_argument("--out", type=Path)
    return parser


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text, encoding="utf-8")


def _run_compute(args) -> int:
    report = compute(args.j, args.p)
    if args.format == "json":
        text = json.dumps(report.to_dict(args.timings), indent=2) + "\n"
    elif args.format == "csv":
        text = reports_to_csv([report])
    else:
        text = reports_to_table([report])
    _emit(text, args.out)
    return EXIT_OK if report.bounds_ok else EXIT_BOUNDS


def _run_sweep(args) -> int:
    cfg = SweepConfig(
        j=args.j,
        samples=args.samples,
        coeff_min=args.coeff_min,
        coeff_max=args.coeff_max,
        seed=args.seed,
        density=args.density,
    )
    result = sweep(cfg, jobs=max(args.jobs, 1))
    if args.format == "json":
        text = sweep_to_json(result, args.timings)
    elif args.format == "csv":
        text = reports_to_csv(result.reports)
    else:
        text = reports_to_table(result.reports)
    _emit(text, args.out)
    if result.error is not None:
        print(f"error: sample {result.failed_index}: [{result.error.code}] {result.error}", file=sys.stderr)
        return result.error.exit_code
    return EXIT_OK if all(r.bounds_ok for r in result.reports) else EXIT_BOUNDS


def _run_profile(args) -> int:
    bundle = validate_bundle(args.j, args.p)
    n_max = bundle.j + 2 if args.n_max is None else args.n_max
    rows = profile(bundle, n_max)
    if args.format == "json":
        doc = [{"n": r.n, "h0": r.h0, "h1": r.h1, "kerRestriction": r.ker_restriction_dim} for r in rows]
        text = json.dumps(doc, indent=2) + "\n"
    else:
        table = [("n", "h0", "h1", "ker_restriction")]
        blank = "" if args.format == "csv" else "-"
        for r in rows:
            ker = blank if r.ker_restriction_dim is None else str(r.ker_restriction_dim)
            table.append((str(r.n), str(r.h0), str(r.h1), ker))
        if args.format == "csv":
            lines = [",".join(row) for row in table]
        else:
            widths = [max(len(row[c]) for row in table) for c in range(4)]
            lines = ["  ".join(cell.rjust(w) for cell, w in zip(row, widths)) for row in table]
        text = "\n".join(lines) + "\n"
    _emit(text, args.out)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    runner = {"compute": _run_compute, "sweep": _run_sweep, "profile": _run_profile}[args.command]
    try:
        return runner(args)
    except BlowupChernError as exc:
        print(f"error: [{exc.code}] {exc}", file=sys.stderr)
        return exc.exit_code
    except ValueError as exc:
        print(f"error: [INVALID_INPUT] {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
