"""Lazy coefficient rows built by the stage-by-stage θ-construction.

A :class:`Row` is an infinite rational sequence θ determined by a finite
target vector ``f`` and two finite lists of earlier rows ``g`` and ``h``.
Values are produced on demand one stage at a time. Stage ``k`` ends at the
milestone ``n_k`` with ``θ(n_k) = 1``; after stage ``k`` the prefix
``θ[0..n_k]`` is final and satisfies:

* ``f[m] == sum(θ(l) * h[m](l) for l <= n_m)`` for every ``m <= k`` in range,
* the support of θ meets ``supp(h[m])``, ``supp(g[m])`` and ``x_m`` only
  inside ``[0, n_m]``.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .adfamily import unpair
from .exactnum import format_rational, parse_rational, to_rational


class InvariantError(RuntimeError):
    """An internal invariant of the construction does not hold."""


def _digest(*parts: str) -> str:
    h = hashlib.sha256()
    for part in parts:
        h.update(part.encode())
        h.update(b"\x00")
    return h.hexdigest()[:16]


class Row:
    """Memoized θ-run. Use :func:`theta_new` to create one."""

    def __init__(self, f: Sequence[Fraction], g: Sequence["Row"], h: Sequence["Row"], label: str | None = None):
        self.f = tuple(to_rational(v) for v in f)
        self.g = tuple(g)
        self.h = tuple(h)
        self.label = label
        self.values: list[Fraction] = []
        self.milestones: list[int] = []
        self.support: list[int] = []
        self.id = _digest(
            "theta",
            ",".join(format_rational(v) for v in self.f),
            ",".join(r.id for r in self.g),
            ",".join(r.id for r in self.h),
        )

    def __repr__(self):
        name = self.label or self.id
        return f"<Row {name} stages={len(self.milestones)} prefix={len(self.values)}>"

    @property
    def stage(self) -> int:
        """Index of the last completed stage (-1 before any)."""
        return len(self.milestones) - 1

    def extend_to(self, i: int) -> None:
        while not self.milestones or self.milestones[-1] < i:
            self.step()

    def extend_stages(self, count: int) -> None:
        while len(self.milestones) < count:
            self.step()

    def value(self, i: int) -> Fraction:
        if i < 0:
            raise IndexError(f"negative index {i}")
        if i >= len(self.values):
            self.extend_to(i)
        return self.values[i]

    def nonzero(self, i: int) -> bool:
        return self.value(i) != 0

    def _blocked(self, p: int, upto: int) -> bool:
        # p in x_m, supp(g[m]) or supp(h[m]) for some m <= upto
        if upto < 0:
            return False
        if unpair(p)[0] <= upto:
            return True
        for rows in (self.g, self.h):
            for r in rows[: upto + 1]:
                if r.nonzero(p):
                    return True
        return False

    def step(self) -> "Row":
        """Run one stage of the construction."""
        k = self.stage
        start = self.milestones[-1] + 1 if self.milestones else 0
        nxt = k + 1
        if nxt >= len(self.f):
            p = start
            while self._blocked(p, k):
                p += 1
            self._append_zeros(p - start)
            self._append(Fraction(1))
        else:
            target = self.h[nxt]
            p = start
            while self._blocked(p, k) or target.value(p) != 1:
                p += 1
            partial = sum((self.values[l] * target.value(l) for l in self.support), Fraction(0))
            correction = self.f[nxt] - partial
            q = p + 1
            while self._blocked(q, nxt):
                q += 1
            self._append_zeros(p - start)
            self._append(correction)
            self._append_zeros(q - p - 1)
            self._append(Fraction(1))
        self.milestones.append(len(self.values) - 1)
        return self

    def _append_zeros(self, count: int) -> None:
        self.values.extend([Fraction(0)] * count)

    def _append(self, v: Fraction) -> None:
        if v != 0:
            self.support.append(len(self.values))
        self.values.append(v)

    def prefix(self, length: int) -> list[Fraction]:
        if length > 0:
            self.extend_to(length - 1)
        return self.values[:length]

    def argument_position(self, other: "Row") -> tuple[str, int] | None:
        """Where ``other`` appears among this run's argument rows, if at all."""
        for i, r in enumerate(self.h):
            if r is other:
                return "h", i
        for i, r in enumerate(self.g):
            if r is other:
                return "g", i
        return None


def theta_new(f: Sequence, g: Sequence[Row], h: Sequence[Row], label: str | None = None, check_args: bool = True) -> Row:
    """Start a lazy θ-run for target ``f`` against argument rows ``g``, ``h``.

    Nothing is evaluated until values are requested.
    """
    if len(h) != len(f):
        raise ValueError(f"length mismatch: len(h)={len(h)} but len(f)={len(f)}")
    if check_args:
        failures = structural_s_failures(list(g) + list(h))
        if failures:
            raise ValueError(f"argument rows do not form an S-pair: {failures[0]}")
    return Row(f, g, h, label=label)


def theta_step(row: Row) -> Row:
    return row.step()


def theta_value(row: Row, i: int) -> Fraction:
    return row.value(i)


def structural_s_failures(rows: Sequence[Row]) -> list[str]:
    """Cheap S-membership check: rows are distinct and pairwise comparable.

    Two rows are comparable when one was built with the other as an argument;
    then the later row's milestone bounds their common support.
    """
    out = []
    for i, a in enumerate(rows):
        if not isinstance(a, Row):
            out.append(f"argument {i} is not a Row")
            continue
        for j in range(i):
            b = rows[j]
            if a is b:
                out.append(f"row {j} repeated at position {i}")
            elif a.argument_position(b) is None and b.argument_position(a) is None:
                out.append(f"rows {j} and {i} have no constructive support bound")
    return out


def intersection_bound(a: Row, b: Row) -> int | None:
    """Largest index where supp(a) and supp(b) may meet, if certified."""
    for later, earlier in ((a, b), (b, a)):
        pos = later.argument_position(earlier)
        if pos is not None:
            later.extend_stages(pos[1] + 1)
            return later.milestones[pos[1]]
    return None


@dataclass
class SPair:
    """Finite lists of g-rows and h-rows meant to lie in S."""

    g_rows: list[Row] = field(default_factory=list)
    h_rows: list[Row] = field(default_factory=list)

    @property
    def rows(self) -> list[Row]:
        return list(self.g_rows) + list(self.h_rows)

    def check(self, horizon: int, min_milestones: int = 1) -> "Report":
        return check_s_rows(self.rows, horizon, min_milestones)


@dataclass
class Report:
    name: str
    passed: bool = True
    failures: list[dict] = field(default_factory=list)
    details: dict = field(default_factory=dict)

    def fail(self, **info) -> None:
        self.passed = False
        self.failures.append(info)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "failures": self.failures,
            "details": self.details,
        }


def check_s_rows(rows: Sequence[Row], horizon: int, min_milestones: int = 1, names: Sequence[str] | None = None) -> Report:
    """Check conditions (a)-(c) of S on ``rows`` up to ``horizon``.

    (a) is certified per pair by the constructive bound and the actual
    intersection below the bound is enumerated; rows are also checked
    against every family set ``x_m`` whose milestone is recorded.
    (b)/(c) require ``min_milestones`` milestones, each valued 1.
    """
    names = list(names) if names is not None else [r.label or r.id for r in rows]
    rep = Report("S")
    for r in rows:
        r.extend_stages(min_milestones)
        r.extend_to(horizon)
    intersections = {}
    for i, a in enumerate(rows):
        for j in range(i):
            b = rows[j]
            if a is b:
                rep.fail(condition="a", rows=[names[j], names[i]], detail="identical rows")
                continue
            bound = intersection_bound(a, b)
            if bound is None:
                rep.fail(condition="a", rows=[names[j], names[i]], detail="no constructive bound")
                continue
            common = []
            for l in a.support:
                if l > horizon:
                    break
                if b.values[l] != 0:
                    if l > bound:
                        rep.fail(condition="a", rows=[names[j], names[i]], index=l, bound=bound)
                    common.append(l)
            intersections[f"{names[j]}|{names[i]}"] = {"bound": bound, "common": common}
        for l in a.support:
            if l > horizon:
                break
            m = unpair(l)[0]
            if m < len(a.milestones) and l > a.milestones[m]:
                rep.fail(condition="a", rows=[names[i], f"x_{m}"], index=l, bound=a.milestones[m])
    for i, r in enumerate(rows):
        cond = "b/c"
        if len(r.milestones) < min_milestones:
            rep.fail(condition=cond, row=names[i], detail=f"only {len(r.milestones)} milestones")
        for n in r.milestones:
            if n < len(r.values) and r.values[n] != 1:
                rep.fail(condition=cond, row=names[i], index=n, value=format_rational(r.values[n]))
    rep.details = {"horizon": horizon, "intersections": intersections}
    return rep


def check_lemma_conclusions(row: Row, horizon: int, min_milestones: int | None = None) -> Report:
    """Exact check of the five θ-run guarantees up to ``horizon``.

    (1) ``f[k]`` equals the sum of ``θ(l) * h[k](l)`` up to milestone ``n_k``
        and the products vanish on ``(n_k, horizon]``;
    (2)/(3) support overlap with ``h[m]`` / ``g[m]`` lies in ``[0, n_m]``;
    (4) support overlap with ``x_m`` lies in ``[0, n_m]``;
    (5) at least ``min_milestones`` milestones, each valued 1.
    """
    if min_milestones is None:
        min_milestones = max(len(row.f), len(row.g), len(row.h)) + 1
    row.extend_stages(min_milestones)
    row.extend_stages(max(len(row.f), len(row.g), len(row.h)))
    row.extend_to(horizon)
    rep = Report("lemma")
    ms = row.milestones
    vals = row.values
    support = [l for l in row.support if l <= horizon]

    for k, target in enumerate(row.f):
        hk = row.h[k]
        hk.extend_to(horizon)
        nk = ms[k]
        total = sum((vals[l] * hk.values[l] for l in support if l <= nk), Fraction(0))
        if total != target:
            rep.fail(conclusion=1, index=k, expected=format_rational(target), got=format_rational(total))
        for l in support:
            if l > nk and hk.values[l] != 0:
                rep.fail(conclusion=1, index=k, position=l, detail="nonzero product beyond cutoff")

    for conclusion, rows in ((2, row.h), (3, row.g)):
        for m, arg in enumerate(rows):
            arg.extend_to(horizon)
            bound = ms[m]
            for l in support:
                if l > bound and arg.values[l] != 0:
                    rep.fail(conclusion=conclusion, index=m, position=l, bound=bound)

    for l in support:
        m = unpair(l)[0]
        if m < len(ms) and l > ms[m]:
            rep.fail(conclusion=4, index=m, position=l, bound=ms[m])

    if len(ms) < min_milestones:
        rep.fail(conclusion=5, detail=f"only {len(ms)} milestones, wanted {min_milestones}")
    for n in ms:
        if vals[n] != 1:
            rep.fail(conclusion=5, position=n, value=format_rational(vals[n]))
    for a, b in zip(ms, ms[1:]):
        if not a < b:
            rep.fail(conclusion=5, detail=f"milestones not increasing at {a}, {b}")

    rep.details = {"horizon": horizon, "milestones": list(ms), "cutoffs": list(ms[: len(row.f)])}
    return rep


def row_to_json(row: Row, length: int) -> dict:
    return {
        "id": row.id,
        "prefix": [format_rational(v) for v in row.prefix(length)],
        "milestones": [n for n in row.milestones if n < length],
    }


@dataclass(frozen=True)
class RowSnapshot:
    """Finite, validated prefix of a serialized row."""

    id: str
    values: tuple[Fraction, ...]
    milestones: tuple[int, ...]

    def value(self, i: int) -> Fraction:
        return self.values[i]


def row_from_json(data: dict) -> RowSnapshot:
    values = tuple(parse_rational(v) for v in data["prefix"])
    milestones = tuple(int(n) for n in data["milestones"])
    if any(b <= a for a, b in zip(milestones, milestones[1:])):
        raise ValueError(f"row {data.get('id')}: milestones not strictly increasing")
    for n in milestones:
        if not 0 <= n < len(values):
            raise ValueError(f"row {data.get('id')}: milestone {n} outside stored prefix")
        if values[n] != 1:
            raise ValueError(f"row {data.get('id')}: value at milestone {n} is {format_rational(values[n])}, not 1")
    return RowSnapshot(str(data["id"]), values, milestones)

