"""Command line front end.

Every command writes a JSON report (stdout, or ``--out`` where that names the
report) and a one-line summary per check to stderr. The exit status is 0 iff
every check passed, 1 if a check failed and 2 on usage errors.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import funcio
from .exactnum import format_rational, parse_rational
from .rank import DEFAULT_EPS, certify_exp_matrix_nonsingular, lowerbound_check


class UsageError(Exception):
    pass


class RunReport:
    def __init__(self, command: str, inputs: dict):
        self.command = command
        self.inputs = inputs
        self.checks: list[dict] = []
        self.timings: dict[str, float] = {}
        self.extra: dict = {}

    def add(self, name: str, passed: bool, **info) -> None:
        self.checks.append({"name": name, "passed": bool(passed), **info})

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.checks)

    def digest(self) -> str:
        blob = json.dumps(self.inputs, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()

    def to_json(self) -> dict:
        return {
            "command": self.command,
            "inputs": self.inputs,
            "inputs_digest": self.digest(),
            "checks": self.checks,
            **self.extra,
            "verdict": "pass" if self.passed else "fail",
            "timings": self.timings,
        }


def _file_digest(path: str) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _rational_list(text: str) -> list[Fraction]:
    try:
        return [parse_rational(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _index_list(text: str | None, n: int) -> list[int]:
    if text is None:
        return list(range(n))
    try:
        out = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"bad position list {text!r}") from None
    bad = [i for i in out if not 0 <= i < n]
    if bad:
        raise UsageError(f"positions {bad} out of range for {n} points")
    return out


def _size_range(text: str) -> range:
    lo, sep, hi = text.partition("..")
    try:
        a, b = int(lo), int(hi) if sep else int(lo)
    except ValueError:
        raise UsageError(f"expected sizes as A..B, got {text!r}") from None
    if not 1 <= a <= b:
        raise UsageError(f"bad size range {text!r}")
    if b > 12:
        raise UsageError("sizes above 12 are not supported")
    return range(a, b + 1)


def _function(spec: str):
    try:
        return funcio.function_from_spec(spec)
    except (ValueError, OSError) as exc:
        raise UsageError(f"function {spec!r}: {exc}") from None


def _add_rep_checks(report: RunReport, rep, horizon):
    ident = rep.verify_all(horizon)
    report.add("identities", ident.passed, horizon=ident.details["horizon"], pairs=ident.details["pairs"], failures=ident.failures)
    s = rep.check_S()
    report.add("S", s.passed, failures=s.failures)


def cmd_build(args) -> RunReport:
    inputs = {"points": _file_digest(args.points), "function": args.function, "horizon": args.horizon, "verify": args.verify}
    if args.function.startswith("table:"):
        inputs["table"] = _file_digest(args.function[len("table:"):])
    report = RunReport("build", inputs)
    t0 = time.perf_counter()
    try:
        points = funcio.load_points(args.points)
    except (ValueError, KeyError, OSError) as exc:
        raise UsageError(f"points file: {exc}") from None
    f = _function(args.function)
    try:
        rep = funcio.build(f, points)
    except ValueError as exc:
        report.add("build", False, error=str(exc))
        return report
    report.add("build", True, points=len(rep))
    report.timings["build"] = time.perf_counter() - t0
    if args.verify:
        t0 = time.perf_counter()
        _add_rep_checks(report, rep, args.horizon)
        report.timings["verify"] = time.perf_counter() - t0
    if report.passed:
        funcio.dump_representation(rep, args.out)
        report.extra["output"] = args.out
    return report


def cmd_verify(args) -> RunReport:
    report = RunReport("verify", {"representation": _file_digest(args.rep), "horizon": args.horizon})
    t0 = time.perf_counter()
    try:
        rep = funcio.load_representation(args.rep)
    except funcio.RepresentationError as exc:
        report.add("load", False, invariant=exc.invariant, error=str(exc))
        return report
    report.add("load", True, points=len(rep))
    _add_rep_checks(report, rep, args.horizon)
    report.timings["verify"] = time.perf_counter() - t0
    return report


def cmd_rank_certify(args) -> RunReport:
    a, b = _rational_list(args.a), _rational_list(args.b)
    try:
        eps = parse_rational(args.eps)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    inputs = {"a": args.a, "b": args.b, "eps": args.eps, "max_refine": args.max_refine}
    report = RunReport("rank-certify", inputs)
    t0 = time.perf_counter()
    try:
        cert = certify_exp_matrix_nonsingular(a, b, eps, args.max_refine)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    report.timings["certify"] = time.perf_counter() - t0
    report.add("nonsingular", cert.certified, **cert.to_json())
    return report


def cmd_lowerbound(args) -> RunReport:
    report = RunReport("lowerbound", {"representation": _file_digest(args.rep), "rows": args.rows, "cols": args.cols})
    t0 = time.perf_counter()
    try:
        rep = funcio.load_representation(args.rep)
    except funcio.RepresentationError as exc:
        report.add("load", False, invariant=exc.invariant, error=str(exc))
        return report
    rows = _index_list(args.rows, len(rep))
    cols = _index_list(args.cols, len(rep))
    lb = lowerbound_check(rep, rows, cols)
    report.add("lowerbound", lb.passed, active=lb.active, rank=lb.rank, rows=rows, cols=cols)
    report.timings["lowerbound"] = time.perf_counter() - t0
    return report


def demo_points(spec: str, m: int) -> list:
    if spec == "e0":
        return [(f"p{i}", funcio.E0Point(format(i, "b"), i % 2)) for i in range(m)]
    return [(f"p{i}", Fraction(i, 2)) for i in range(m)]


def demo_function(spec: str, m: int):
    if spec.startswith("randtable:"):
        seed = spec.split(":")[1]
        return _function(f"randtable:{seed}:{m}")
    return _function(spec)


def cmd_demo_growth(args) -> RunReport:
    sizes = _size_range(args.sizes)
    report = RunReport("demo-growth", {"sizes": args.sizes, "function": args.function})
    demo_function(args.function, sizes[0])
    table = []
    t0 = time.perf_counter()
    for m in sizes:
        rep = funcio.build(demo_function(args.function, m), demo_points(args.function, m))
        ident = rep.verify_all()
        lb = lowerbound_check(rep)
        row = {"size": m, "active": lb.active, "rank": lb.rank, "identities": ident.passed}
        table.append(row)
        report.add(f"size {m}", lb.passed and ident.passed, active=lb.active, rank=lb.rank)
    report.timings["demo"] = time.perf_counter() - t0
    report.extra["table"] = table
    return report


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="davies", description="Exact pointwise-finite rectangular representations.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="build a representation point by point")
    p.add_argument("--points", required=True)
    p.add_argument("--function", required=True, help="product | zero | e0 | expseries:K | randtable:SEED:M | table:PATH")
    p.add_argument("--out", required=True, help="representation file to write")
    p.add_argument("--verify", action="store_true")
    p.add_argument("--horizon", type=int, default=None, help="stress horizon (default 4x largest cutoff)")
    p.set_defaults(run=cmd_build)

    p = sub.add_parser("verify", help="revalidate a representation file")
    p.add_argument("rep")
    p.add_argument("--horizon", type=int, default=None)
    p.set_defaults(run=cmd_verify)

    p = sub.add_parser("rank-certify", help="certify that [exp(a_i b_j)] is nonsingular")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--eps", default=format_rational(DEFAULT_EPS))
    p.add_argument("--max-refine", type=int, default=20)
    p.set_defaults(run=cmd_rank_certify)

    p = sub.add_parser("lowerbound", help="compare active indices with the exact grid rank")
    p.add_argument("rep")
    p.add_argument("--rows")
    p.add_argument("--cols")
    p.set_defaults(run=cmd_lowerbound)

    p = sub.add_parser("demo-growth", help="active indices vs grid rank over a range of sizes")
    p.add_argument("--sizes", required=True, help="A..B inclusive")
    p.add_argument("--function", required=True)
    p.add_argument("--out")
    p.set_defaults(run=cmd_demo_growth)

    for name in ("build", "verify", "rank-certify", "lowerbound"):
        sub.choices[name].add_argument("--report", help="write the JSON report here instead of stdout")
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        report = args.run(args)
    except UsageError as exc:
        print(f"davies {args.command}: {exc}", file=sys.stderr)
        return 2
    text = json.dumps(report.to_json(), indent=2, sort_keys=True) + "\n"
    dest = args.out if args.command == "demo-growth" else getattr(args, "report", None)
    if dest:
        Path(dest).write_text(text)
    else:
        sys.stdout.write(text)
    for c in report.checks:
        print(f"{'PASS' if c['passed'] else 'FAIL'} {c['name']}", file=sys.stderr)
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
