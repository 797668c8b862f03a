"""Builtin pair functions, table and points files, representation files."""

from __future__ import annotations

import csv
import json
import random
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from pathlib import Path
from typing import Any

from .builder import PairFunction, Point, Representation, layout_bound
from .exactnum import format_rational, parse_rational
from .theta import row_from_json, row_to_json

FORMAT = "davies-representation/1"


class FunctionSpecError(ValueError):
    pass


class RepresentationError(ValueError):
    """A representation file failed revalidation."""

    def __init__(self, invariant: str, message: str):
        super().__init__(f"{invariant}: {message}")
        self.invariant = invariant


@dataclass(frozen=True)
class E0Point:
    """The eventually constant bit sequence ``prefix`` followed by ``tail`` forever."""

    prefix: str
    tail: int

    def __post_init__(self):
        if set(self.prefix) - {"0", "1"}:
            raise ValueError(f"E0 prefix must be a bit string, got {self.prefix!r}")
        if self.tail not in (0, 1):
            raise ValueError(f"E0 tail must be 0 or 1, got {self.tail!r}")

    def bit(self, n: int) -> int:
        return int(self.prefix[n]) if n < len(self.prefix) else self.tail


def e0_related(x: E0Point, y: E0Point) -> bool:
    # both sequences are constant from max(len) on
    return x.tail == y.tail


def _rational_payload(p: Point) -> Fraction:
    if not isinstance(p.payload, Fraction):
        raise FunctionSpecError(f"point {p.label!r} needs a rational payload")
    return p.payload


def _e0_payload(p: Point) -> E0Point:
    if not isinstance(p.payload, E0Point):
        raise FunctionSpecError(f"e0 needs E0 points, got payload {p.payload!r} for {p.label!r}")
    return p.payload


def expseries(t: Fraction, order: int) -> Fraction:
    """``sum(t**m / m! for m <= order)`` exactly."""
    return sum((t**m / factorial(m) for m in range(order + 1)), Fraction(0))


def random_table_entry(seed: str, i: int, j: int) -> Fraction:
    rnd = random.Random(f"randtable:{seed}:{i}:{j}")
    return Fraction(rnd.randint(-9, 9), rnd.randint(1, 9))


def random_table(seed: str, m: int) -> list[list[Fraction]]:
    return [[random_table_entry(seed, i, j) for j in range(m)] for i in range(m)]


def table_function(table: list[list[Fraction]], descriptor: str = "table") -> PairFunction:
    nrows = len(table)
    ncols = len(table[0]) if table else 0

    def evaluate(x: Point, y: Point) -> Fraction:
        if x.position >= nrows or y.position >= ncols:
            raise FunctionSpecError(
                f"table is {nrows}x{ncols}, no entry for positions ({x.position}, {y.position})"
            )
        return table[x.position][y.position]

    return PairFunction(descriptor, evaluate, table=table)


def builtin(descriptor: str) -> PairFunction:
    name, _, rest = descriptor.partition(":")
    if name == "product" and not rest:
        return PairFunction(descriptor, lambda x, y: _rational_payload(x) * _rational_payload(y))
    if name == "zero" and not rest:
        return PairFunction(descriptor, lambda x, y: Fraction(0))
    if name == "e0" and not rest:
        return PairFunction(descriptor, lambda x, y: Fraction(int(e0_related(_e0_payload(x), _e0_payload(y)))))
    if name == "expseries":
        try:
            order = int(rest)
        except ValueError:
            raise FunctionSpecError(f"bad truncation order in {descriptor!r}") from None
        if order < 0:
            raise FunctionSpecError("truncation order must be >= 0")
        return PairFunction(descriptor, lambda x, y: expseries(_rational_payload(x) * _rational_payload(y), order))
    if name == "randtable":
        seed, _, size = rest.rpartition(":")
        try:
            m = int(size)
        except ValueError:
            raise FunctionSpecError(f"expected randtable:SEED:M, got {descriptor!r}") from None
        if not seed or m < 0:
            raise FunctionSpecError(f"expected randtable:SEED:M, got {descriptor!r}")
        f = table_function(random_table(seed, m), descriptor)
        f.table = None  # regenerated from the descriptor
        return f
    raise FunctionSpecError(f"unknown function descriptor {descriptor!r}")


def parse_table(rows: list[list[str]]) -> list[list[Fraction]]:
    table = [[parse_rational(cell) for cell in row] for row in rows if row]
    if table and any(len(r) != len(table[0]) for r in table):
        raise ValueError("table rows have different lengths")
    return table


def load_table(path: str | Path) -> PairFunction:
    with open(path, newline="") as fh:
        table = parse_table(list(csv.reader(fh)))
    return table_function(table)


def dump_table(table: list[list[Fraction]], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        for row in table:
            w.writerow([format_rational(v) for v in row])


def function_from_spec(spec: str) -> PairFunction:
    """``table:PATH`` loads a CSV table, anything else is a builtin."""
    if spec.startswith("table:"):
        return load_table(spec[len("table:"):])
    return builtin(spec)


def check_dimensions(f: PairFunction, npoints: int) -> None:
    if f.table is not None:
        nrows = len(f.table)
        ncols = len(f.table[0]) if f.table else 0
        if nrows != npoints or ncols != npoints:
            raise FunctionSpecError(f"table is {nrows}x{ncols} but there are {npoints} points")


def payload_to_json(payload: Any):
    if payload is None:
        return None
    if isinstance(payload, Fraction):
        return format_rational(payload)
    if isinstance(payload, E0Point):
        return {"prefix": payload.prefix, "tail": payload.tail}
    raise TypeError(f"cannot serialize payload {payload!r}")


def payload_from_json(data):
    if data is None:
        return None
    if isinstance(data, str):
        return parse_rational(data)
    if isinstance(data, int) and not isinstance(data, bool):
        return Fraction(data)
    if isinstance(data, dict):
        return E0Point(str(data["prefix"]), int(data["tail"]))
    raise ValueError(f"bad point payload {data!r}")


def load_points(path: str | Path) -> list[tuple[str, Any]]:
    with open(path) as fh:
        data = json.load(fh)
    if not isinstance(data, list):
        raise ValueError("points file must hold a JSON list")
    out = []
    for item in data:
        if isinstance(item, str):
            out.append((item, None))
        else:
            out.append((str(item["label"]), payload_from_json(item.get("payload"))))
    return out


def dump_points(points: list[tuple[str, Any]], path: str | Path) -> None:
    data = [{"label": label, "payload": payload_to_json(payload)} for label, payload in points]
    Path(path).write_text(json.dumps(data, indent=2) + "\n")


def build(f: PairFunction, points: list[tuple[str, Any]]) -> Representation:
    check_dimensions(f, len(points))
    rep = Representation(f)
    for label, payload in points:
        rep.add_point(label, payload)
    return rep


def stored_length(rep: Representation) -> int:
    """Prefix length written for every row.

    Covers stage ``len(rep)`` of every row, hence every cutoff.
    """
    n = len(rep)
    longest = 0
    for r in rep.rows():
        r.extend_stages(n + 1)
        longest = max(longest, r.milestones[n] + 1)
    return longest


def representation_to_json(rep: Representation) -> dict:
    n = len(rep)
    length = stored_length(rep)
    fn = {"descriptor": rep.f.descriptor}
    if rep.f.table is not None:
        fn["table"] = [[format_rational(v) for v in row] for row in rep.f.table]
    rows = []
    for i, p in enumerate(rep.points):
        for kind, r in (("g", rep.g_rows[i]), ("h", rep.h_rows[i])):
            rows.append({"point": i, "kind": kind, **row_to_json(r, length)})
    return {
        "format": FORMAT,
        "function": fn,
        "points": [{"label": p.label, "payload": payload_to_json(p.payload)} for p in rep.points],
        "prefix_length": length,
        "rows": rows,
        "cutoffs": [[rep.cutoff(i, j) for j in range(n)] for i in range(n)],
    }


def dumps_representation(rep: Representation) -> str:
    return json.dumps(representation_to_json(rep), indent=1, sort_keys=True) + "\n"


def dump_representation(rep: Representation, path: str | Path) -> None:
    Path(path).write_text(dumps_representation(rep))


def _function_from_json(data: dict) -> PairFunction:
    if "table" in data:
        return table_function(parse_table(data["table"]), data["descriptor"])
    return builtin(data["descriptor"])


def representation_from_json(data: dict) -> Representation:
    """Revalidate a stored representation and return the live rebuild.

    Checks, in order: milestone marks, the S-overlap bounds inside the stored
    prefix, every pair identity with its stored cutoff, and finally that a
    fresh build reproduces the stored rows and cutoffs exactly.
    """
    if data.get("format") != FORMAT:
        raise RepresentationError("format", f"unsupported format {data.get('format')!r}")
    try:
        f = _function_from_json(data["function"])
        points = [(p["label"], payload_from_json(p.get("payload"))) for p in data["points"]]
        raw_rows = data["rows"]
        cutoffs = data["cutoffs"]
        length = int(data["prefix_length"])
    except (KeyError, TypeError, ValueError) as exc:
        raise RepresentationError("schema", str(exc)) from None
    n = len(points)
    if len(raw_rows) != 2 * n or len(cutoffs) != n or any(len(c) != n for c in cutoffs):
        raise RepresentationError("schema", "row or cutoff count does not match points")

    snaps = {}
    for k, raw in enumerate(raw_rows):
        key = (raw.get("kind"), raw.get("point"))
        if key != ("gh"[k % 2], k // 2):
            raise RepresentationError("schema", f"row {k} is {key}, expected {('gh'[k % 2], k // 2)}")
        try:
            snap = row_from_json(raw)
        except ValueError as exc:
            raise RepresentationError("milestone marks", str(exc)) from None
        if len(snap.values) != length:
            raise RepresentationError("schema", f"row {key} prefix has {len(snap.values)} values, expected {length}")
        if len(snap.milestones) < n + 1:
            raise RepresentationError("schema", f"row {key} stores fewer than {n + 1} milestones")
        snaps[key] = snap
    milestones = {key: s.milestones for key, s in snaps.items()}

    keys = list(snaps)
    for a in range(len(keys)):
        for b in range(a):
            bound = layout_bound(milestones, keys[a], keys[b])
            va, vb = snaps[keys[a]].values, snaps[keys[b]].values
            for l in range(bound + 1, length):
                if va[l] != 0 and vb[l] != 0:
                    raise RepresentationError("S(a)", f"rows {keys[b]} and {keys[a]} share index {l} beyond bound {bound}")

    try:
        check_dimensions(f, n)
        pts = [Point(label, payload, i) for i, (label, payload) in enumerate(points)]
        for i in range(n):
            for j in range(n):
                c = cutoffs[i][j]
                expected_c = layout_bound(milestones, ("g", i), ("h", j))
                if c != expected_c:
                    raise RepresentationError("cutoff", f"pair ({i},{j}) stores {c}, milestones give {expected_c}")
                g, h = snaps[("g", i)].values, snaps[("h", j)].values
                total = sum((g[l] * h[l] for l in range(c + 1)), Fraction(0))
                value = f(pts[i], pts[j])
                if total != value:
                    raise RepresentationError(
                        "identity", f"pair ({i},{j}): sum up to {c} is {format_rational(total)}, f is {format_rational(value)}"
                    )
                for l in range(c + 1, length):
                    if g[l] * h[l] != 0:
                        raise RepresentationError("identity", f"pair ({i},{j}): nonzero product at {l} beyond cutoff {c}")
    except FunctionSpecError as exc:
        raise RepresentationError("function", str(exc)) from None

    try:
        rep = build(f, points)
    except ValueError as exc:
        raise RepresentationError("points", str(exc)) from None
    fresh = representation_to_json(rep)
    for k, (old, new) in enumerate(zip(raw_rows, fresh["rows"])):
        if old != new:
            raise RepresentationError("provenance", f"row {k} does not match a fresh build")
    if fresh["cutoffs"] != cutoffs or fresh["prefix_length"] != length:
        raise RepresentationError("provenance", "cutoffs do not match a fresh build")
    return rep


def loads_representation(text: str) -> Representation:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise RepresentationError("schema", f"not JSON: {exc}") from None
    return representation_from_json(data)


def load_representation(path: str | Path) -> Representation:
    return loads_representation(Path(path).read_text())
