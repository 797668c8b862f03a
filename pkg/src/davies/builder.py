"""Point-by-point construction of a pointwise-finite rectangular representation.

Points are inserted in a fixed order that plays the role of the
well-ordering. When point ``x`` arrives after ``w_0, ..., w_{n-1}``:

* its g-row is the θ-run of ``f(x, w_m)`` against the g-rows and h-rows of
  the predecessors, which settles ``f(x, y)`` for every earlier ``y``;
* its h-row is the θ-run of ``f(w'_m, x)`` over ``w' = w + [x]`` against
  the earlier h-rows and all g-rows including the new one, which settles
  ``f(y, x)`` for every ``y`` up to and including ``x``.

Every pair ``(i, j)`` then has a certified cutoff ``C(i, j)``: the sum
``sum_n g_i(n) h_j(n)`` equals ``f(i, j)`` using only ``n <= C(i, j)`` and
all later products are zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Iterable, Sequence

from .exactnum import format_rational
from .theta import InvariantError, Report, Row, check_s_rows, structural_s_failures, theta_new


@dataclass(frozen=True)
class Point:
    label: str
    payload: Any = None
    position: int = -1


class PointOrder:
    """Insertion-ordered point labels.

    ``predecessors`` is the initial-segment enumeration, ``position`` the
    index lookup into it and ``successor`` the next inserted point.
    """

    def __init__(self):
        self.points: list[Point] = []
        self.index: dict[str, int] = {}

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __getitem__(self, i: int) -> Point:
        return self.points[i]

    def add(self, label: str, payload: Any = None) -> Point:
        if not isinstance(label, str) or not label:
            raise ValueError(f"point labels must be non-empty strings, got {label!r}")
        if label in self.index:
            raise ValueError(f"duplicate point label {label!r}")
        p = Point(label, payload, len(self.points))
        self.points.append(p)
        self.index[label] = p.position
        return p

    def position(self, label: str) -> int:
        return self.index[label]

    def predecessors(self, label: str) -> list[Point]:
        return self.points[: self.index[label]]

    def successor(self, label: str) -> Point | None:
        i = self.index[label] + 1
        return self.points[i] if i < len(self.points) else None


@dataclass
class PairFunction:
    """Exact rational function of two points."""

    descriptor: str
    evaluator: Callable[[Point, Point], Fraction]
    table: list[list[Fraction]] | None = None

    def __call__(self, x: Point, y: Point) -> Fraction:
        return self.evaluator(x, y)


@dataclass
class PairCertificate:
    i: int
    j: int
    cutoff: int
    value: Fraction
    total: Fraction
    horizon: int
    passed: bool = True
    counterexample: dict | None = None

    def to_json(self) -> dict:
        return {
            "i": self.i,
            "j": self.j,
            "cutoff": self.cutoff,
            "f": format_rational(self.value),
            "sum": format_rational(self.total),
            "horizon": self.horizon,
            "passed": self.passed,
            "counterexample": self.counterexample,
        }


class Representation:
    def __init__(self, f: PairFunction):
        self.f = f
        self.order = PointOrder()
        self.g_rows: list[Row] = []
        self.h_rows: list[Row] = []

    def __len__(self):
        return len(self.order)

    @property
    def points(self) -> list[Point]:
        return self.order.points

    def rows(self) -> list[Row]:
        """All rows in construction order: g_0, h_0, g_1, h_1, ..."""
        out = []
        for g, h in zip(self.g_rows, self.h_rows):
            out += [g, h]
        return out

    def row_names(self) -> list[str]:
        out = []
        for p in self.points:
            out += [f"g[{p.label}]", f"h[{p.label}]"]
        return out

    def add_point(self, label: str, payload: Any = None) -> "Representation":
        x = self.order.add(label, payload)
        try:
            self._attach_rows(x)
        except Exception:
            del self.order.index[label]
            self.order.points.pop()
            raise
        return self

    def _attach_rows(self, x: Point) -> None:
        prev = self.order.points[: x.position]
        f0 = [self.f(x, w) for w in prev]
        g_new = theta_new(f0, self.g_rows, self.h_rows, label=f"g[{x.label}]", check_args=False)
        g1 = self.g_rows + [g_new]
        bad = structural_s_failures(self.h_rows + g1)
        if bad:
            raise InvariantError(f"S-invariant violated before h-row of {x.label!r}: {bad[0]}")
        f1 = [self.f(w, x) for w in prev + [x]]
        h_new = theta_new(f1, self.h_rows, g1, label=f"h[{x.label}]", check_args=False)
        self.g_rows.append(g_new)
        self.h_rows.append(h_new)

    def _check_pos(self, i: int) -> None:
        if not 0 <= i < len(self.order):
            raise IndexError(f"position {i} out of range for {len(self.order)} points")

    def eval_g(self, i: int, n: int) -> Fraction:
        self._check_pos(i)
        return self.g_rows[i].value(n)

    def eval_h(self, i: int, n: int) -> Fraction:
        self._check_pos(i)
        return self.h_rows[i].value(n)

    def cutoff(self, i: int, j: int) -> int:
        """Certified last index that can contribute to ``f(i, j)``."""
        self._check_pos(i)
        self._check_pos(j)
        if j >= i:
            row, m = self.h_rows[j], i
        else:
            row, m = self.g_rows[i], j
        row.extend_stages(m + 1)
        return row.milestones[m]

    def default_horizon(self) -> int:
        n = len(self.order)
        return 4 * max((self.cutoff(i, j) for i in range(n) for j in range(n)), default=0)

    def _products(self, i: int, j: int, upto: int) -> Iterable[tuple[int, Fraction]]:
        g, h = self.g_rows[i], self.h_rows[j]
        g.extend_to(upto)
        h.extend_to(upto)
        for n in g.support:
            if n > upto:
                break
            v = g.values[n] * h.values[n]
            if v:
                yield n, v

    def verify_pair(self, i: int, j: int, stress_horizon: int | None = None) -> PairCertificate:
        c = self.cutoff(i, j)
        horizon = max(c, self.default_horizon() if stress_horizon is None else stress_horizon)
        value = self.f(self.points[i], self.points[j])
        total = Fraction(0)
        cert = PairCertificate(i, j, c, value, total, horizon)
        for n, v in self._products(i, j, horizon):
            if n <= c:
                total += v
            elif cert.passed:
                cert.passed = False
                cert.counterexample = {
                    "i": i,
                    "j": j,
                    "n": n,
                    "g": format_rational(self.g_rows[i].values[n]),
                    "h": format_rational(self.h_rows[j].values[n]),
                    "detail": "nonzero product beyond cutoff",
                }
        cert.total = total
        if total != value and cert.passed:
            cert.passed = False
            cert.counterexample = {
                "i": i,
                "j": j,
                "n": c,
                "expected": format_rational(value),
                "got": format_rational(total),
                "detail": "sum up to cutoff differs from f",
            }
        return cert

    def verify_all(self, stress_horizon: int | None = None) -> Report:
        if stress_horizon is None:
            stress_horizon = self.default_horizon()
        rep = Report("identities")
        n = len(self.order)
        certs = []
        for i in range(n):
            for j in range(n):
                cert = self.verify_pair(i, j, stress_horizon)
                certs.append(cert.to_json())
                if not cert.passed:
                    rep.fail(**cert.counterexample)
        rep.details = {"horizon": stress_horizon, "pairs": len(certs), "certificates": certs}
        return rep

    def check_S(self, sample_horizon: int | None = None) -> Report:
        """Conditions (a)-(c) on all rows.

        Every row is extended to at least ``sample_horizon`` milestones and
        overlaps are enumerated exhaustively up to the furthest milestone
        reached.
        """
        rows = self.rows()
        if sample_horizon is None:
            sample_horizon = len(self.order) + 1
        for r in rows:
            r.extend_stages(sample_horizon)
        horizon = max((r.milestones[-1] for r in rows), default=0)
        return check_s_rows(rows, horizon, sample_horizon, names=self.row_names())

    def last_nonzero_index(self, i: int, j: int) -> int | None:
        last = None
        for n, _ in self._products(i, j, self.cutoff(i, j)):
            last = n
        return last

    def active_index_set(self, rows: Sequence[int], cols: Sequence[int]) -> set[int]:
        out: set[int] = set()
        for i in rows:
            for j in cols:
                out.update(n for n, _ in self._products(i, j, self.cutoff(i, j)))
        return out

    def grid(self, rows: Sequence[int] | None = None, cols: Sequence[int] | None = None) -> list[list[Fraction]]:
        rows = range(len(self.order)) if rows is None else rows
        cols = range(len(self.order)) if cols is None else cols
        pts = self.points
        return [[self.f(pts[i], pts[j]) for j in cols] for i in rows]


def new_builder(f: PairFunction) -> Representation:
    return Representation(f)


def add_point(rep: Representation, label: str, payload: Any = None) -> Representation:
    return rep.add_point(label, payload)


def eval_g(rep: Representation, i: int, n: int) -> Fraction:
    return rep.eval_g(i, n)


def eval_h(rep: Representation, i: int, n: int) -> Fraction:
    return rep.eval_h(i, n)


def verify_pair(rep: Representation, i: int, j: int, stress_horizon: int | None = None) -> PairCertificate:
    return rep.verify_pair(i, j, stress_horizon)


def verify_all(rep: Representation, stress_horizon: int | None = None) -> Report:
    return rep.verify_all(stress_horizon)


def check_S(rep: Representation, sample_horizon: int | None = None) -> Report:
    return rep.check_S(sample_horizon)


def last_nonzero_index(rep: Representation, i: int, j: int) -> int | None:
    return rep.last_nonzero_index(i, j)


def active_index_set(rep: Representation, rows: Sequence[int], cols: Sequence[int]) -> set[int]:
    return rep.active_index_set(rows, cols)


def layout_bound(milestones: dict[tuple[str, int], Sequence[int]], a: tuple[str, int], b: tuple[str, int]) -> int:
    """Support-overlap bound for two rows of a built representation.

    Rows are keyed ``("g", i)`` / ``("h", i)``. The later-built row took the
    earlier one as an argument at the earlier row's point index.
    """

    def ordinal(key):
        return 2 * key[1] + (key[0] == "h")

    later, earlier = (a, b) if ordinal(a) > ordinal(b) else (b, a)
    return milestones[later][earlier[1]]
