"""Exact rational scalars and rational-endpoint interval arithmetic.

Rationals are :class:`fractions.Fraction`. Intervals carry exact rational
endpoints, so every enclosure is sound without any rounding-mode tricks.
"""

from __future__ import annotations

import math
import operator
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Sequence, Union

Rational = Fraction
RationalLike = Union[Fraction, int, str]

DEFAULT_MAX_DET_SIZE = 8
COFACTOR_MAX_SIZE = 6


class Indeterminate(ArithmeticError):
    """An interval pivot straddles zero; retry with tighter enclosures."""


def to_rational(value: RationalLike) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def parse_rational(text: str) -> Fraction:
    """Parse ``"p/q"`` or ``"p"`` exactly.

    Decimal and float notation is rejected on purpose.
    """
    s = text.strip()
    if not s:
        raise ValueError("empty rational")
    num, sep, den = s.partition("/")
    try:
        p = int(num)
        q = int(den) if sep else 1
    except ValueError:
        raise ValueError(f"malformed rational {text!r}") from None
    if q == 0:
        raise ValueError(f"zero denominator in {text!r}")
    return Fraction(p, q)


def format_rational(x: Fraction) -> str:
    x = to_rational(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


_RATIONAL_OPS = {
    "+": operator.add,
    "-": operator.sub,
    "*": operator.mul,
    "/": operator.truediv,
}


def rational_arith(a: RationalLike, b: RationalLike, op: str) -> Fraction:
    a, b = to_rational(a), to_rational(b)
    try:
        fn = _RATIONAL_OPS[op]
    except KeyError:
        raise ValueError(f"unknown operator {op!r}") from None
    if op == "/" and b == 0:
        raise ZeroDivisionError("rational division by zero")
    return fn(a, b)


def rational_det(rows: Sequence[Sequence[RationalLike]]) -> Fraction:
    """Exact determinant by Gaussian elimination over the rationals."""
    m = [[to_rational(v) for v in row] for row in rows]
    n = len(m)
    if any(len(row) != n for row in m):
        raise ValueError("determinant needs a square matrix")
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        p = m[c][c]
        det *= p
        for r in range(c + 1, n):
            factor = m[r][c] / p
            if factor:
                for k in range(c, n):
                    m[r][k] -= factor * m[c][k]
    return det


@dataclass(frozen=True)
class Interval:
    """Closed interval ``[lo, hi]`` with exact rational endpoints."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        lo, hi = to_rational(self.lo), to_rational(self.hi)
        if lo > hi:
            raise ValueError(f"empty interval [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def point(cls, x: RationalLike) -> "Interval":
        x = to_rational(x)
        return cls(x, x)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def contains(self, x: RationalLike) -> bool:
        x = to_rational(x)
        return self.lo <= x <= self.hi

    def contains_zero(self) -> bool:
        return self.lo <= 0 <= self.hi

    def intersects(self, other: "Interval") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def __add__(self, other):
        other = _as_interval(other)
        return Interval(self.lo + other.lo, self.hi + other.hi)

    __radd__ = __add__

    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def __sub__(self, other):
        other = _as_interval(other)
        return Interval(self.lo - other.hi, self.hi - other.lo)

    def __rsub__(self, other):
        return _as_interval(other) - self

    def __mul__(self, other):
        other = _as_interval(other)
        c = (self.lo * other.lo, self.lo * other.hi, self.hi * other.lo, self.hi * other.hi)
        return Interval(min(c), max(c))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_interval(other)
        if other.contains_zero():
            raise ZeroDivisionError(f"interval division by {other}, which contains 0")
        return self * Interval(1 / other.hi, 1 / other.lo)

    def __rtruediv__(self, other):
        return _as_interval(other) / self

    def to_json(self) -> dict:
        return {"lo": format_rational(self.lo), "hi": format_rational(self.hi)}

    @classmethod
    def from_json(cls, data: dict) -> "Interval":
        return cls(parse_rational(data["lo"]), parse_rational(data["hi"]))

    def __str__(self):
        return f"[{format_rational(self.lo)}, {format_rational(self.hi)}]"


def _as_interval(x) -> Interval:
    if isinstance(x, Interval):
        return x
    return Interval.point(to_rational(x))


_INTERVAL_OPS = {
    "+": operator.add,
    "-": operator.sub,
    "*": operator.mul,
    "/": operator.truediv,
}


def interval_arith(a: Interval, b: Interval, op: str) -> Interval:
    try:
        fn = _INTERVAL_OPS[op]
    except KeyError:
        raise ValueError(f"unknown operator {op!r}") from None
    return fn(_as_interval(a), _as_interval(b))


def _exp_remainder_factor(x: Fraction) -> int:
    # e^|x| <= 4^ceil(|x|)
    return 4 ** math.ceil(abs(x))


def exp_enclosure(x: RationalLike, eps: RationalLike) -> Interval:
    """Certified enclosure of ``e**x`` with width at most ``eps``.

    The Taylor polynomial of degree M is summed exactly, and the Lagrange
    remainder is bounded by ``|x|**(M+1)/(M+1)! * 4**ceil(|x|)``. M grows
    until that bound is at most ``eps/4``; the endpoints are then rounded
    outward to a dyadic grid of spacing at most ``eps/8`` to keep the
    denominators small.
    """
    x, eps = to_rational(x), to_rational(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    if x == 0:
        return Interval.point(1)
    factor = _exp_remainder_factor(x)
    target = eps / 4
    total = Fraction(1)
    term = Fraction(1)
    m = 0
    while True:
        # term == x^m / m!; bound the tail after degree m
        nxt = term * x / (m + 1)
        bound = abs(nxt) * factor
        if bound <= target:
            break
        total += nxt
        term = nxt
        m += 1
    # 2^-k <= eps/8
    scale = 1 << math.ceil(8 / eps).bit_length()
    lo = Fraction(math.floor((total - bound) * scale), scale)
    hi = Fraction(math.ceil((total + bound) * scale), scale)
    return Interval(lo, hi)


def _check_square(matrix, max_size):
    n = len(matrix)
    if any(len(row) != n for row in matrix):
        raise ValueError("determinant needs a square matrix")
    if n > max_size:
        raise ValueError(f"matrix size {n} exceeds configured maximum {max_size}")
    return n


def _cofactor_det(m: list[list[Interval]]) -> Interval:
    # Laplace expansion with minors memoized by their column set; row r of the
    # minor for a column set of size n - r is row r.
    n = len(m)
    minors: dict[tuple[int, ...], Interval] = {(): Interval.point(1)}
    for size in range(1, n + 1):
        row = n - size
        nxt = {}
        for cols in combinations(range(n), size):
            acc = Interval.point(0)
            for pos, c in enumerate(cols):
                rest = cols[:pos] + cols[pos + 1:]
                term = m[row][c] * minors[rest]
                acc = acc - term if pos % 2 else acc + term
            nxt[cols] = acc
        minors = nxt
    return minors[tuple(range(n))]


def _bareiss_det(m: list[list[Interval]]) -> Interval:
    n = len(m)
    a = [row[:] for row in m]
    sign = 1
    prev = Interval.point(1)
    for k in range(n - 1):
        if a[k][k].contains_zero():
            swap = next((r for r in range(k + 1, n) if not a[r][k].contains_zero()), None)
            if swap is None:
                raise Indeterminate(f"no pivot excludes zero in column {k}")
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev
        prev = a[k][k]
    det = a[n - 1][n - 1]
    return -det if sign < 0 else det


def interval_det(matrix: Sequence[Sequence[Interval]], max_size: int = DEFAULT_MAX_DET_SIZE) -> Interval:
    """Enclosure of the determinant of every real matrix inside ``matrix``.

    Uses cofactor expansion up to 6x6 and fraction-free interval elimination
    above that; the latter raises :class:`Indeterminate` when every candidate
    pivot contains zero.
    """
    m = [[_as_interval(v) for v in row] for row in matrix]
    n = _check_square(m, max_size)
    if n == 0:
        return Interval.point(1)
    if n <= COFACTOR_MAX_SIZE:
        return _cofactor_det(m)
    return _bareiss_det(m)
