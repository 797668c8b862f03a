from collections import Counter

import pytest

from davies.adfamily import ad_enumerate, ad_member, pair, unpair


def test_pair_values():
    assert pair(0, 0) == 0
    assert pair(1, 0) == 1
    assert pair(0, 1) == 2


def test_membership_examples():
    assert ad_member(0, 0)
    assert not ad_member(0, 1)
    assert ad_member(2, 3)


def test_enumerate_examples():
    assert ad_enumerate(0, 4) == [0, 2, 5, 9]
    assert ad_enumerate(1, 3) == [1, 4, 8]
    assert ad_enumerate(5, 0) == []


def test_bijective_below_10k():
    hits = Counter()
    for s in range(150):
        for k in range(s + 1):
            m = pair(s - k, k)
            if m < 10**4:
                hits[m] += 1
    assert all(hits[m] == 1 for m in range(10**4))
    assert all(pair(*unpair(m)) == m for m in range(10**4))


def test_disjoint_columns():
    for m in range(10**4):
        owners = [n for n in range(145) if ad_member(n, m)]
        assert len(owners) == 1


def test_columns_are_infinite():
    for n in range(100):
        xs = ad_enumerate(n, 100)
        assert len(xs) == 100
        assert all(a < b for a, b in zip(xs, xs[1:]))
        assert all(ad_member(n, x) for x in xs)


def test_negative_arguments():
    with pytest.raises(ValueError):
        pair(-1, 0)
    assert not ad_member(0, -1)
