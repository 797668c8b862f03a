"""Shared generators for the test suite."""

from fractions import Fraction

from davies.builder import Representation
from davies.funcio import table_function
from davies.theta import theta_new


def random_rational(rnd, num=9, den=6):
    return Fraction(rnd.randint(-num, num), rnd.randint(1, den))


def random_table(rnd, m, ncols=None):
    ncols = m if ncols is None else ncols
    return [[random_rational(rnd) for _ in range(ncols)] for _ in range(m)]


def table_rep(table, add=True):
    rep = Representation(table_function(table))
    if add:
        for i in range(len(table)):
            rep.add_point(f"p{i}")
    return rep


def random_theta_inputs(rnd, max_pool=6, max_f=6):
    """Argument rows for a θ-run, each built by an earlier θ-run over all previous ones."""
    pool = []
    for _ in range(rnd.randint(0, max_pool)):
        pool.append(_chained_run(rnd, pool, len(pool)))
    k = rnd.randint(0, min(max_f, len(pool)))
    h = rnd.sample(pool, k)
    g = [r for r in pool if all(r is not x for x in h)]
    rnd.shuffle(g)
    f = [random_rational(rnd) for _ in h]
    return f, g, h


def _chained_run(rnd, pool, k_max):
    h = rnd.sample(pool, rnd.randint(0, k_max))
    g = [r for r in pool if all(r is not x for x in h)]
    rnd.shuffle(g)
    return theta_new([random_rational(rnd) for _ in h], g, h)
