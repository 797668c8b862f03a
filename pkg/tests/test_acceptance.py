"""Acceptance criteria, one test each.

Every test prints a ``CRITERION n: PASS|FAIL`` line; the lines are repeated
in the terminal summary. All comparisons are exact rational equality.
"""

import json
import random
import time
from fractions import Fraction

import pytest

from davies.builder import Representation
from davies.funcio import build, dumps_representation, loads_representation, table_function
from davies.rank import certify_exp_matrix_nonsingular, exact_rank, lowerbound_check, matmul
from davies.theta import check_lemma_conclusions, row_to_json, theta_new

from .helpers import random_rational, random_table, random_theta_inputs
from .test_rank import minor_rank

SEED = 20240611


def line(record, n, ok, detail):
    record(f"CRITERION {n}: {'PASS' if ok else 'FAIL'} - {detail}")


def criterion_1():
    """Hand traces; returns (ok, detail, artifact bytes)."""
    row = theta_new([], [], [])
    ok = row.prefix(7) == [1, 1, 0, 1, 0, 0, 1] and row.milestones[:4] == [0, 1, 3, 6]
    rep = build(table_function([[Fraction(5)]]), [("x0", None)])
    ok &= rep.g_rows[0].prefix(7) == [1, 1, 0, 1, 0, 0, 1]
    ok &= rep.h_rows[0].prefix(5) == [5, 0, 0, 0, 1]
    cert = rep.verify_pair(0, 0, 50)
    ok &= cert.passed and cert.total == 5 and cert.cutoff == 4
    return ok, f"milestones {row.milestones[:4]}, cutoff {cert.cutoff}, sum {cert.total}", dumps_representation(rep)


def criterion_2(seed=SEED, runs=200):
    rnd = random.Random(seed)
    failures = []
    blobs = []
    max_f = 0
    for t in range(runs):
        f, g, h = random_theta_inputs(rnd, max_pool=6, max_f=6)
        max_f = max(max_f, len(f))
        row = theta_new(f, g, h)
        row.extend_stages(max(len(f), len(g), len(h)) + 1)
        horizon = 4 * row.milestones[-1]
        rep = check_lemma_conclusions(row, horizon)
        if not rep.passed:
            failures.append((t, rep.failures[:3]))
        blobs.append(row_to_json(row, horizon + 1))
    return failures, max_f, json.dumps(blobs, sort_keys=True)


def criterion_3(seed=SEED):
    rnd = random.Random(seed)
    failures = []
    reps = []
    dumps = []
    for m in range(1, 11):
        table = random_table(rnd, m)
        rep = Representation(table_function(table))
        for i in range(m):
            rep.add_point(f"p{i}")
            ident, s = rep.verify_all(), rep.check_S()
            if not (ident.passed and s.passed):
                failures.append((m, i, ident.failures[:2], s.failures[:2]))
        text = dumps_representation(rep)
        if dumps_representation(loads_representation(text)) != text:
            failures.append((m, "roundtrip"))
        reps.append(rep)
        dumps.append(text)
    return failures, reps, dumps


def test_criterion_1_hand_traces(acceptance_line):
    t0 = time.perf_counter()
    ok, detail, _ = criterion_1()
    elapsed = time.perf_counter() - t0
    ok = ok and elapsed < 1
    line(acceptance_line, 1, ok, f"{detail}, {elapsed:.3f}s (< 1s)")
    assert ok


def test_criterion_2_lemma_suite(acceptance_line):
    t0 = time.perf_counter()
    failures, max_f, _ = criterion_2()
    elapsed = time.perf_counter() - t0
    ok = not failures and elapsed < 30
    line(acceptance_line, 2, ok, f"200 runs (max len f = {max_f}), {len(failures)} failing, {elapsed:.1f}s (< 30s)")
    assert not failures, failures[:3]
    assert elapsed < 30


@pytest.fixture(scope="module")
def induction_sweep():
    t0 = time.perf_counter()
    failures, reps, dumps = criterion_3()
    return failures, reps, dumps, time.perf_counter() - t0


def test_criterion_3_induction_suite(acceptance_line, induction_sweep):
    failures, reps, _, elapsed = induction_sweep
    ok = not failures and elapsed < 60
    line(acceptance_line, 3, ok, f"m = 1..10, {len(failures)} failures, round trips byte-identical, {elapsed:.1f}s (< 60s)")
    assert not failures, failures[:3]
    assert elapsed < 60


def test_criterion_4_rank_lower_bound(acceptance_line, induction_sweep):
    _, reps, _, _ = induction_sweep
    bad = []
    for rep in reps:
        lb = lowerbound_check(rep)
        if not lb.passed:
            bad.append((len(rep), lb.active, lb.rank))
    rnd = random.Random(SEED + 4)
    bad_products = []
    for _ in range(100):
        inner = rnd.randint(1, 4)
        r, c = rnd.randint(1, 6), rnd.randint(1, 6)
        a = [[random_rational(rnd) for _ in range(inner)] for _ in range(r)]
        b = [[random_rational(rnd) for _ in range(c)] for _ in range(inner)]
        if exact_rank(matmul(a, b)) > inner:
            bad_products.append((r, inner, c))
    ok = not bad and not bad_products
    line(acceptance_line, 4, ok, f"{len(reps)} representations, 100 products; violations {len(bad)} / {len(bad_products)}")
    assert ok


def random_distinct(rnd, n, max_den=16):
    vals = set()
    while len(vals) < n:
        q = rnd.randint(1, max_den)
        vals.add(Fraction(rnd.randint(-4 * q, 4 * q), q))
    out = sorted(vals)
    rnd.shuffle(out)
    return out


def test_criterion_5_exp_matrix_certification(acceptance_line):
    rnd = random.Random(SEED + 5)
    t0 = time.perf_counter()
    uncertified = []
    most = 0
    for _ in range(50):
        n = rnd.randint(1, 6)
        a, b = random_distinct(rnd, n), random_distinct(rnd, n)
        cert = certify_exp_matrix_nonsingular(a, b, max_refinements=20)
        most = max(most, cert.refinements)
        if not cert.certified:
            uncertified.append((a, b))
    elapsed = time.perf_counter() - t0
    ok = not uncertified and elapsed < 60
    line(acceptance_line, 5, ok, f"50 pairs, {len(uncertified)} uncertified, max refinements {most}, {elapsed:.1f}s (< 60s)")
    assert not uncertified
    assert elapsed < 60


def test_criterion_6_rank_oracle(acceptance_line):
    rnd = random.Random(SEED + 6)
    mismatches = 0
    deficient = 0
    for t in range(100):
        r, c = rnd.randint(1, 4), rnd.randint(1, 4)
        if t % 2:
            # low-rank product, so deficiency is common
            k = rnd.randint(1, max(1, min(r, c) - 1))
            m = matmul([[random_rational(rnd) for _ in range(k)] for _ in range(r)],
                       [[random_rational(rnd) for _ in range(c)] for _ in range(k)])
        else:
            m = [[Fraction(rnd.choice([0, 0, 1, -1, 2]), rnd.randint(1, 2)) for _ in range(c)] for _ in range(r)]
        expected = minor_rank(m)
        deficient += expected < min(r, c)
        mismatches += exact_rank(m) != expected
    ok = mismatches == 0
    line(acceptance_line, 6, ok, f"100 matrices ({deficient} rank-deficient), {mismatches} mismatches")
    assert ok


def test_criterion_7_determinism(acceptance_line, induction_sweep):
    _, _, first3, _ = induction_sweep
    _, _, first1 = criterion_1()
    _, _, first2 = criterion_2(runs=200)
    _, _, second1 = criterion_1()
    _, _, second2 = criterion_2(runs=200)
    _, _, second3 = criterion_3()
    same = first1 == second1 and first2 == second2 and first3 == second3
    line(acceptance_line, 7, same, f"criteria 1-3 rerun, {2 + len(first3)} artifacts byte-identical")
    assert same
