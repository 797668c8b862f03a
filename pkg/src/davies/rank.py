"""Term-count lower bounds for rectangular representations.

If ``f(a_i, b_j) = sum_{l < n} g_l(a_i) h_l(b_j)`` on a grid, the grid matrix
factors through an inner dimension ``n``, so its rank is at most ``n``. Two
consequences are checked here:

* the exact rank of any rational grid bounds from below the number of
  indices that a representation actually uses on that grid;
* ``[exp(a_i * b_j)]`` with distinct ``a``'s and distinct ``b``'s is
  nonsingular, certified by interval determinant enclosures.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Sequence

from .builder import PairFunction, Representation
from .exactnum import Indeterminate, Interval, exp_enclosure, format_rational, interval_det, to_rational
from .theta import Report

RationalMatrix = list[list[Fraction]]

DEFAULT_EPS = Fraction(1, 2**32)


def exact_rank(matrix: Sequence[Sequence]) -> int:
    """Rank over Q by fraction-free (Bareiss) elimination.

    Rows are first scaled to integers, which leaves the rank unchanged.
    """
    a = []
    for row in matrix:
        vals = [to_rational(v) for v in row]
        d = lcm(*(v.denominator for v in vals)) if vals else 1
        a.append([int(v * d) for v in vals])
    if not a:
        return 0
    nrows, ncols = len(a), len(a[0])
    if any(len(r) != ncols for r in a):
        raise ValueError("matrix is not rectangular")
    rank = 0
    prev = 1
    for c in range(ncols):
        if rank == nrows:
            break
        piv = next((r for r in range(rank, nrows) if a[r][c] != 0), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        p = a[rank][c]
        for r in range(rank + 1, nrows):
            for k in range(c + 1, ncols):
                a[r][k] = (a[r][k] * p - a[r][c] * a[rank][k]) // prev
            a[r][c] = 0
        prev = p
        rank += 1
    return rank


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> RationalMatrix:
    inner = len(b)
    cols = len(b[0]) if b else 0
    return [[sum((to_rational(row[k]) * to_rational(b[k][c]) for k in range(inner)), Fraction(0)) for c in range(cols)] for row in a]


def transpose(m: Sequence[Sequence]) -> RationalMatrix:
    return [list(col) for col in zip(*m)]


class Verdict(str, enum.Enum):
    NONSINGULAR = "NonsingularCertified"
    INDETERMINATE = "Indeterminate"


@dataclass
class Certificate:
    verdict: Verdict
    eps: Fraction
    enclosure: Interval | None
    refinements: int = 0

    @property
    def certified(self) -> bool:
        return self.verdict is Verdict.NONSINGULAR

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "eps": format_rational(self.eps),
            "enclosure": self.enclosure.to_json() if self.enclosure is not None else None,
            "refinements": self.refinements,
        }


def exp_matrix_enclosure(a: Sequence[Fraction], b: Sequence[Fraction], eps: Fraction) -> list[list[Interval]]:
    return [[exp_enclosure(x * y, eps) for y in b] for x in a]


def certify_exp_matrix_nonsingular(a: Sequence, b: Sequence, initial_eps=DEFAULT_EPS, max_refinements: int = 20) -> Certificate:
    a = [to_rational(v) for v in a]
    b = [to_rational(v) for v in b]
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} a-values, {len(b)} b-values")
    if not a:
        raise ValueError("need at least one point on each side")
    for name, vals in (("a", a), ("b", b)):
        if len(set(vals)) != len(vals):
            raise ValueError(f"entries of {name} must be pairwise distinct")
    eps = to_rational(initial_eps)
    if eps <= 0:
        raise ValueError("initial_eps must be positive")
    enclosure = None
    for attempt in range(max_refinements + 1):
        try:
            enclosure = interval_det(exp_matrix_enclosure(a, b, eps))
        except Indeterminate:
            enclosure = None
        if enclosure is not None and not enclosure.contains_zero():
            return Certificate(Verdict.NONSINGULAR, eps, enclosure, attempt)
        if attempt < max_refinements:
            eps /= 2
    return Certificate(Verdict.INDETERMINATE, eps, enclosure, max_refinements)


def grid_matrix(f: PairFunction, points: Sequence, rows: Sequence[int], cols: Sequence[int]) -> RationalMatrix:
    return [[f(points[i], points[j]) for j in cols] for i in rows]


@dataclass
class LowerBoundReport(Report):
    active: int = 0
    rank: int = 0
    active_indices: list[int] = field(default_factory=list)


def lowerbound_check(rep: Representation, rows: Sequence[int] | None = None, cols: Sequence[int] | None = None) -> LowerBoundReport:
    rows = list(range(len(rep))) if rows is None else list(rows)
    cols = list(range(len(rep))) if cols is None else list(cols)
    active = sorted(rep.active_index_set(rows, cols))
    r = exact_rank(grid_matrix(rep.f, rep.points, rows, cols))
    out = LowerBoundReport("lowerbound", active=len(active), rank=r, active_indices=active)
    out.details = {"rows": rows, "cols": cols, "active": len(active), "rank": r}
    if len(active) < r:
        out.fail(detail="fewer active indices than grid rank", active=len(active), rank=r)
    return out
