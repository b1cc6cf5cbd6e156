import itertools
import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cubestab.coxeter import (
    EXCEEDED,
    INF,
    CoxeterParseError,
    classify,
    enumerate_coxeter,
    is_fc,
    is_spherical,
    make_system,
    parse_coxeter,
    spherical_subsets,
)

LABELS = [2, 3, 4, 5, 6, INF]

# Orders of the irreducible finite types, used as an oracle against coset counts.
def _type_order(name):
    if name.startswith("I2("):
        return 2 * int(name[3:-1])
    kind, n = name[0], int(name[1:])
    if kind == "A":
        return math.factorial(n + 1)
    if kind == "B":
        return 2**n * math.factorial(n)
    if kind == "D":
        return 2 ** (n - 1) * math.factorial(n)
    return {"E6": 51840, "E7": 2903040, "E8": 696729600, "F4": 1152, "H3": 120, "H4": 14400}[name]


def triangle(ab, bc, ac):
    return make_system("abc", {("a", "b"): ab, ("b", "c"): bc, ("a", "c"): ac})


@pytest.mark.parametrize("m", [2, 3, 4, 5, 6])
def test_dihedral_order(m):
    sys = make_system("st", {("s", "t"): m})
    assert enumerate_coxeter(sys, "st", 10000) == 2 * m
    assert math.prod(_type_order(t) for t in classify(sys, "st")) == 2 * m


def test_infinite_dihedral_exceeds_cap():
    assert enumerate_coxeter(make_system("st"), "st", 1000) == EXCEEDED


@pytest.mark.parametrize(
    "labels,order",
    [((3, 3, 2), 24), ((3, 4, 2), 48), ((5, 3, 2), 120), ((2, 2, 5), 20), ((2, 2, 2), 8)],
)
def test_rank_three_orders(labels, order):
    sys = triangle(*labels)
    assert enumerate_coxeter(sys, "abc", 10000) == order
    assert math.prod(_type_order(t) for t in classify(sys, "abc")) == order


@pytest.mark.parametrize("labels", [(2, 3, 6), (3, 3, 3), (2, 4, 4), (3, 3, 4), (2, 3, INF)])
def test_infinite_triangles(labels):
    sys = triangle(*labels)
    assert not is_spherical(sys, "abc")
    assert enumerate_coxeter(sys, "abc", 10000) == EXCEEDED


@pytest.mark.parametrize(
    "edges,name",
    [
        ({("a", "b"): 3, ("b", "c"): 3, ("c", "d"): 3}, "A4"),
        ({("a", "b"): 4, ("b", "c"): 3, ("c", "d"): 3}, "B4"),
        ({("a", "b"): 3, ("b", "c"): 3, ("b", "d"): 3}, "D4"),
        ({("a", "b"): 3, ("b", "c"): 4, ("c", "d"): 3}, "F4"),
        ({("a", "b"): 5, ("b", "c"): 3, ("c", "d"): 3}, "H4"),
    ],
)
def test_rank_four_templates(edges, name):
    sys = make_system("abcd", edges, default=2)
    assert classify(sys, "abcd") == [name]


def test_rank_four_orders_match_enumeration():
    for edges in ({("a", "b"): 3, ("b", "c"): 4, ("c", "d"): 3}, {("a", "b"): 3, ("b", "c"): 3, ("b", "d"): 3}):
        sys = make_system("abcd", edges, default=2)
        (name,) = classify(sys, "abcd")
        assert enumerate_coxeter(sys, "abcd", 5000) == _type_order(name)


def test_affine_rank_four_not_spherical():
    # a 4-cycle of 3's is affine A3
    sys = make_system("abcd", {("a", "b"): 3, ("b", "c"): 3, ("c", "d"): 3, ("a", "d"): 3}, default=2)
    assert classify(sys, "abcd") is None


@settings(max_examples=60, deadline=None)
@given(st.tuples(*[st.sampled_from(LABELS)] * 3))
def test_spherical_agrees_with_enumeration(labels):
    sys = triangle(*labels)
    assert is_spherical(sys, "abc") == (enumerate_coxeter(sys, "abc", 10000) != EXCEEDED)


def _brute_fc(sys):
    for k in range(1, len(sys.generators) + 1):
        for sub in itertools.combinations(sys.generators, k):
            finite = all(sys.m(s, t) is not INF for s, t in itertools.combinations(sub, 2))
            if finite and not is_spherical(sys, sub):
                return False
    return True


@settings(max_examples=80, deadline=None)
@given(st.lists(st.sampled_from(LABELS), min_size=6, max_size=6))
def test_fc_matches_brute_force(labels):
    pairs = list(itertools.combinations("abcd", 2))
    sys = make_system("abcd", dict(zip(pairs, labels)))
    ok, witness = is_fc(sys)
    assert ok == _brute_fc(sys)
    if not ok:
        assert all(sys.m(s, t) is not INF for s, t in itertools.combinations(witness, 2))
        assert not is_spherical(sys, witness)


def test_triangle_not_fc():
    assert is_fc(triangle(3, 3, 3)) == (False, ("a", "b", "c"))
    assert is_fc(triangle(3, 3, INF)) == (True, None)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.sampled_from(LABELS), min_size=3, max_size=3))
def test_spherical_subsets_downward_closed(labels):
    sys = triangle(*labels)
    poset = spherical_subsets(sys)
    assert frozenset() in poset
    for s in poset.subsets:
        for t in s:
            assert s - {t} in poset
        assert is_spherical(sys, s)


def test_parse_roundtrip_and_default():
    sys = parse_coxeter(json.dumps({"generators": ["s", "t", "u"], "default_m": 2,
                                    "labels": [{"pair": ["s", "t"], "m": "inf"}]}))
    assert sys.m("s", "t") is INF and sys.m("t", "u") == 2
    again = parse_coxeter(sys.to_json())
    assert again == sys


@pytest.mark.parametrize(
    "payload,field",
    [
        ({"generators": "st"}, "generators"),
        ({"generators": ["s", "s"]}, "generators"),
        ({"generators": ["s", "t"], "labels": [{"pair": ["s", "x"], "m": 3}]}, "labels[0].pair"),
        ({"generators": ["s", "t"], "labels": [{"pair": ["s", "t"], "m": 1}]}, "labels[0].m"),
        ({"generators": ["s", "t"], "labels": [{"pair": ["s", "t"], "m": 3}, {"pair": ["t", "s"], "m": 4}]}, "labels[1]"),
        ({"generators": ["s"], "default_m": "x"}, "default_m"),
    ],
)
def test_parse_errors_name_field(payload, field):
    with pytest.raises(CoxeterParseError, match=field.replace("[", r"\[").replace("]", r"\]")):
        parse_coxeter(payload)
