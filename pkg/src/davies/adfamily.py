"""The fixed recursive family of pairwise disjoint infinite sets of naturals.

Set ``n`` is the column ``{pair(n, k) : k >= 0}`` of the Cantor pairing.
Disjoint columns are in particular almost disjoint, and membership is a
constant number of integer operations.
"""

from __future__ import annotations

from math import isqrt


def pair(n: int, k: int) -> int:
    if n < 0 or k < 0:
        raise ValueError("pair() is defined on naturals only")
    s = n + k
    return s * (s + 1) // 2 + k


def unpair(m: int) -> tuple[int, int]:
    """Inverse of :func:`pair`."""
    if m < 0:
        raise ValueError("unpair() is defined on naturals only")
    s = (isqrt(8 * m + 1) - 1) // 2
    k = m - s * (s + 1) // 2
    return s - k, k


def ad_member(n: int, m: int) -> bool:
    return m >= 0 and unpair(m)[0] == n


def ad_enumerate(n: int, count: int) -> list[int]:
    return [pair(n, k) for k in range(count)]
