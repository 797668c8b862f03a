import itertools
import json
from fractions import Fraction

import pytest

from davies.builder import Point
from davies.exactnum import exp_enclosure
from davies.funcio import (
    E0Point,
    FunctionSpecError,
    RepresentationError,
    build,
    builtin,
    dump_points,
    dump_representation,
    dump_table,
    dumps_representation,
    expseries,
    load_points,
    load_representation,
    load_table,
    loads_representation,
    random_table,
    table_function,
)

from .helpers import random_table as helper_table


def pt(payload, i=0):
    return Point(f"p{i}", payload, i)


def test_builtin_examples():
    assert builtin("product")(pt(Fraction(2)), pt(Fraction(3), 1)) == 6
    assert builtin("expseries:2")(pt(Fraction(1)), pt(Fraction(1), 1)) == Fraction(5, 2)
    e0 = builtin("e0")
    assert e0(pt(E0Point("01", 0)), pt(E0Point("1", 0), 1)) == 1
    assert e0(pt(E0Point("01", 0)), pt(E0Point("1", 1), 1)) == 0
    assert builtin("zero")(pt(None), pt(None)) == 0


@pytest.mark.parametrize("desc", ["nope", "expseries:x", "randtable:3", "product:1", "expseries:-1"])
def test_unknown_descriptors(desc):
    with pytest.raises(FunctionSpecError):
        builtin(desc)


def test_e0_needs_e0_points():
    with pytest.raises(FunctionSpecError):
        builtin("e0")(pt(Fraction(1)), pt(Fraction(1)))


def test_randtable_deterministic():
    f = builtin("randtable:abc:4")
    g = builtin("randtable:abc:4")
    pts = [pt(None, i) for i in range(4)]
    assert [[f(a, b) for b in pts] for a in pts] == [[g(a, b) for b in pts] for a in pts] == random_table("abc", 4)
    with pytest.raises(FunctionSpecError):
        f(pt(None, 4), pts[0])


def test_expseries_within_truncation_error():
    # Lagrange tail for |t| <= 1/2 and order K: |t|^(K+1)/(K+1)! * e^(1/2) < 2 |t|^(K+1)/(K+1)!
    order = 8
    for t in [Fraction(1, 2), Fraction(-1, 3), Fraction(1, 7)]:
        approx = expseries(t, order)
        tail = 2 * abs(t) ** (order + 1) / 362880
        enc = exp_enclosure(t, Fraction(1, 10**12))
        assert enc.lo - tail <= approx <= enc.hi + tail


def test_e0_is_an_equivalence():
    pts = [E0Point("".join(bits), tail) for n in range(3) for bits in itertools.product("01", repeat=n) for tail in (0, 1)]
    f = builtin("e0")
    rel = {(a, b): f(pt(a), pt(b)) == 1 for a in pts for b in pts}
    assert all(rel[a, a] for a in pts)
    assert all(rel[a, b] == rel[b, a] for a in pts for b in pts)
    for a, b, c in itertools.product(pts, repeat=3):
        if rel[a, b] and rel[b, c]:
            assert rel[a, c]


def test_e0_point_validation():
    with pytest.raises(ValueError):
        E0Point("012", 0)
    with pytest.raises(ValueError):
        E0Point("01", 2)
    assert E0Point("10", 1).bit(0) == 1 and E0Point("10", 1).bit(7) == 1


def test_table_files(tmp_path):
    path = tmp_path / "t.csv"
    path.write_text("5/1\n")
    f = load_table(path)
    assert f(pt(None), pt(None)) == 5

    table = [[Fraction(1, 2), Fraction(-3)], [Fraction(0), Fraction(7, 9)]]
    dump_table(table, path)
    assert load_table(path).table == table

    path.write_text("1/0\n")
    with pytest.raises(ValueError):
        load_table(path)
    path.write_text("1,2\n3\n")
    with pytest.raises(ValueError):
        load_table(path)


def test_table_dimension_mismatch():
    f = table_function([[Fraction(1)]])
    with pytest.raises(FunctionSpecError):
        build(f, [("a", None), ("b", None)])


def test_points_roundtrip(tmp_path):
    points = [("a", Fraction(1, 2)), ("b", E0Point("01", 1)), ("c", None)]
    path = tmp_path / "p.json"
    dump_points(points, path)
    assert load_points(path) == points


@pytest.fixture
def rep1():
    return build(table_function([[Fraction(5)]]), [("x0", None)])


def test_representation_roundtrip(rep1, tmp_path):
    text = dumps_representation(rep1)
    again = loads_representation(text)
    assert dumps_representation(again) == text
    path = tmp_path / "r.json"
    dump_representation(rep1, path)
    assert dumps_representation(load_representation(path)) == text
    data = json.loads(text)
    assert data["cutoffs"] == [[4]]
    assert data["rows"][0]["prefix"][:7] == ["1", "1", "0", "1", "0", "0", "1"]
    assert data["rows"][1]["prefix"][:5] == ["5", "0", "0", "0", "1"]


def test_empty_representation_roundtrip():
    rep = build(builtin("product"), [])
    text = dumps_representation(rep)
    assert dumps_representation(loads_representation(text)) == text


def test_builtin_representation_roundtrip():
    rep = build(builtin("expseries:3"), [(f"p{i}", Fraction(i, 3)) for i in range(4)])
    text = dumps_representation(rep)
    assert dumps_representation(loads_representation(text)) == text
    assert "table" not in json.loads(text)["function"]


def _tamper(text, mutate):
    data = json.loads(text)
    mutate(data)
    return json.dumps(data)


@pytest.mark.parametrize(
    "mutate, invariant",
    [
        (lambda d: d["rows"][1]["prefix"].__setitem__(0, "4"), "identity"),
        (lambda d: d["rows"][0]["prefix"].__setitem__(3, "2"), "milestone marks"),
        (lambda d: d["function"]["table"][0].__setitem__(0, "6"), "identity"),
        (lambda d: d["cutoffs"][0].__setitem__(0, 7), "cutoff"),
        (lambda d: d["rows"][0]["prefix"].__setitem__(2, "1"), "provenance"),
        (lambda d: d.__setitem__("format", "other"), "format"),
        (lambda d: d["rows"].pop(), "schema"),
    ],
)
def test_tampered_file_rejected(rep1, mutate, invariant):
    text = _tamper(dumps_representation(rep1), mutate)
    with pytest.raises(RepresentationError) as exc:
        loads_representation(text)
    assert exc.value.invariant == invariant


def test_tampered_overlap_rejected(rnd):
    rep = build(table_function(helper_table(rnd, 2)), [("a", None), ("b", None)])
    data = json.loads(dumps_representation(rep))
    # put a nonzero into g[b] where h[a] is nonzero beyond their bound
    ga, hb = data["rows"][2], data["rows"][1]
    bound = data["rows"][2]["milestones"][0]
    idx = next(l for l in range(bound + 1, len(hb["prefix"])) if hb["prefix"][l] != "0" and ga["prefix"][l] == "0")
    ga["prefix"][idx] = "3"
    with pytest.raises(RepresentationError) as exc:
        loads_representation(json.dumps(data))
    assert exc.value.invariant == "S(a)"
