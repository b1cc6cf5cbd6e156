import itertools
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cubestab import corpus
from cubestab.graphprod import (
    GraphProductError,
    ResourceCapExceeded,
    VertexGroup,
    act,
    brute_force_stabiliser,
    build_davis_ball,
    clique_group,
    coset_rep,
    cube_stabiliser,
    elements_up_to,
    format_word,
    invert,
    multiply,
    normal_form,
    parse_graph_product,
    symmetric_group_table,
)
from cubestab.median import check_flag_links, validate

SYSTEMS = sorted(corpus.GRAPH_PRODUCTS)


def rewrite_closure(sys, word):
    """Every word reachable by shuffling commuting neighbours or merging equal-vertex neighbours."""
    start = tuple(syl for syl in word if syl[1])
    seen = {start}
    todo = [start]
    while todo:
        w = todo.pop()
        for i in range(len(w) - 1):
            (u, x), (v, y) = w[i], w[i + 1]
            if u == v:
                z = sys.groups[u].mul(x, y)
                nxt = w[:i] + (((u, z),) if z else ()) + w[i + 2:]
            elif sys.commute(u, v):
                nxt = w[:i] + (w[i + 1], w[i]) + w[i + 2:]
            else:
                continue
            if nxt not in seen:
                seen.add(nxt)
                todo.append(nxt)
    return seen


def words(sys, max_len):
    syl = st.sampled_from([(v, x) for v in sys.vertices for x in range(1, sys.groups[v].order)])
    return st.lists(syl, max_size=max_len)


@st.composite
def system_and_words(draw, n=2, max_len=6):
    sys = corpus.graph_product(draw(st.sampled_from(SYSTEMS)))
    return sys, [draw(words(sys, max_len)) for _ in range(n)]


# -- vertex groups and parsing --------------------------------------------------

def test_symmetric_table_is_a_group():
    g = VertexGroup(tuple(map(tuple, symmetric_group_table(3))))
    assert g.order == 6
    assert any(g.mul(x, y) != g.mul(y, x) for x in range(6) for y in range(6))


@pytest.mark.parametrize(
    "table,msg",
    [((), "square"), (((0, 1), (1, 1)), "inverse"), (((1, 0), (0, 1)), "identity"),
     (((0, 1, 2), (1, 0, 0), (2, 0, 0)), "associative|inverse")],
)
def test_bad_tables_rejected(table, msg):
    with pytest.raises(GraphProductError, match=msg):
        VertexGroup(table)


def test_parse_rejects_unknown_edge_vertex():
    with pytest.raises(GraphProductError, match="unknown vertex"):
        parse_graph_product({"vertices": [{"name": "a", "group": {"cyclic": 2}}], "edges": [["a", "b"]]})


def test_json_roundtrip():
    sys = corpus.graph_product("sym3")
    again = parse_graph_product(sys.to_json())
    assert again.to_json() == sys.to_json()


# -- word problem ---------------------------------------------------------------

@settings(max_examples=150, deadline=None)
@given(system_and_words(n=1, max_len=7))
def test_normal_form_reachable_and_minimal(data):
    sys, (w,) = data
    nf = normal_form(sys, w)
    closure = rewrite_closure(sys, w)
    assert nf in closure
    assert len(nf) == min(len(x) for x in closure)
    # shuffle-equivalent minimal words share the normal form
    for x in closure:
        if len(x) == len(nf):
            assert normal_form(sys, x) == nf


@settings(max_examples=150, deadline=None)
@given(system_and_words(n=2, max_len=5))
def test_equality_matches_rewriting_oracle(data):
    sys, (u, v) = data
    inv_v = [(s, sys.groups[s].inverses[x]) for s, x in reversed(v)]
    trivial = () in rewrite_closure(sys, u + inv_v)
    assert (normal_form(sys, u) == normal_form(sys, v)) == trivial


@settings(max_examples=100, deadline=None)
@given(system_and_words(n=3, max_len=5))
def test_group_axioms(data):
    sys, ws = data
    a, b, c = (normal_form(sys, w) for w in ws)
    assert multiply(sys, multiply(sys, a, b), c) == multiply(sys, a, multiply(sys, b, c))
    assert multiply(sys, a, invert(sys, a)) == ()
    assert multiply(sys, (), a) == a == multiply(sys, a, ())


def test_format_word():
    assert format_word(()) == "1"
    assert format_word((("a", 1), ("b", 1))) == "a^1*b^1"


@pytest.mark.parametrize("name", SYSTEMS)
def test_coset_reps_unique_and_shortest(name):
    sys = corpus.graph_product(name)
    for g in elements_up_to(sys, 2):
        for lam in sys.cliques:
            coset = [multiply(sys, g, k) for k in clique_group(sys, lam)]
            reps = {coset_rep(sys, h, lam) for h in coset}
            assert len(reps) == 1
            (rep,) = reps
            assert rep in coset and len(rep) == min(len(h) for h in coset)


def test_coset_rep_needs_clique():
    sys = corpus.graph_product("dihedral")
    with pytest.raises(GraphProductError):
        coset_rep(sys, (), {"a", "b"})


# -- Davis balls ----------------------------------------------------------------

# (vertices, cubes, interior cubes) at radius 3, margin 2; computed once by
# build_davis_ball and frozen after checking the small cases by hand.
FROZEN = {
    "dihedral": (15, 29, 17),
    "k2": (9, 25, 25),
    "z3_free_z2": (29, 57, 25),
    "path3": (41, 129, 41),
    "cycle4": (129, 457, 73),
    "sym3": (497, 1301, 71),
}


@pytest.mark.parametrize("name", SYSTEMS)
def test_ball_sizes_frozen(name):
    ball = build_davis_ball(corpus.graph_product(name), 3, 2)
    got = (len(ball.complex.vertices), len(ball.complex), len(ball.interior))
    assert got == FROZEN[name]
    assert validate(ball.complex) == []
    assert check_flag_links(ball.complex, [v for v in ball.complex.vertices if v in ball.core])[0]


def test_k2_ball_is_the_full_complex():
    ball = build_davis_ball(corpus.graph_product("k2"), 2, 1)
    cx = ball.complex
    assert (len(cx.vertices), len(cx.edges), len(cx.cubes[2])) == (9, 12, 4)
    assert cx.dim == 2


def test_dihedral_radius_two_vertices():
    ball = build_davis_ball(corpus.graph_product("dihedral"), 2, 1)
    labels = {ball.vertex_label(v) for v in ball.complex.vertices}
    assert len(labels) == 11
    assert {"a^1*b^1<a>", "b^1*a^1<b>", "1<>", "1<a>", "1<b>"} <= labels


def test_vertex_cap():
    with pytest.raises(ResourceCapExceeded):
        build_davis_ball(corpus.graph_product("cycle4"), 3, 2, cap_vertices=50)


@pytest.mark.parametrize("name", ["dihedral", "k2", "path3", "z3_free_z2"])
def test_stabiliser_formula_matches_search(name):
    sys = corpus.graph_product(name)
    ball = build_davis_ball(sys, 3, 2)
    for cube in sorted(ball.interior, key=ball.complex.key):
        d = ball.cube_data[cube]
        if len(d.g) > 1:
            continue
        formula = cube_stabiliser(sys, ball, cube)
        assert formula == brute_force_stabiliser(sys, ball, cube, 2 * len(d.g) + len(d.lambda1))
        assert formula.order == math.prod(sys.groups[v].order for v in d.lambda1)


@pytest.mark.parametrize("name", ["k2", "path3"])
def test_action_preserves_cubes(name):
    sys = corpus.graph_product(name)
    ball = build_davis_ball(sys, 3, 2)
    for g in elements_up_to(sys, 1):
        for cube in ball.complex.all_cubes():
            img = act(sys, ball, g, cube)
            assert img == "outside" or img in ball.complex
