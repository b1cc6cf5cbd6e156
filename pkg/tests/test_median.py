import itertools

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cubestab.median import (
    CubeComplexError,
    MedianError,
    assemble,
    check_flag_links,
    convex_hull,
    cube_dim,
    enumerate_normal_paths,
    hyperplanes,
    interval,
    is_normal_path,
    median,
    normal_cube_path,
    star,
    to_dot,
    validate,
)


def box(*sizes):
    """Product of paths with ``sizes[i]`` vertices each, all cubes filled."""
    verts = list(itertools.product(*[range(n) for n in sizes]))
    vset = set(verts)
    cubes = []
    for v in verts:
        for k in range(1, len(sizes) + 1):
            for dirs in itertools.combinations(range(len(sizes)), k):
                corner = [v[i] + (1 if i in dirs else 0) for i in range(len(sizes))]
                if tuple(corner) in vset:
                    cubes.append(_cube_at(v, dirs))
    edges = [c for c in cubes if len(c) == 2]
    return assemble(verts, edges, cubes)


def _cube_at(v, dirs):
    out = []
    for bits in itertools.product((0, 1), repeat=len(dirs)):
        w = list(v)
        for d, b in zip(dirs, bits):
            w[d] += b
        out.append(tuple(w))
    return out


def young(rows):
    """Square complex of a Young diagram with the given (weakly decreasing) row lengths."""
    cells = [(i, j) for j, r in enumerate(rows) for i in range(r)]
    cubes = [[(i, j), (i + 1, j), (i, j + 1), (i + 1, j + 1)] for i, j in cells]
    verts = sorted({v for c in cubes for v in c}, key=lambda p: (p[1], p[0]))
    edges = {frozenset(p) for c in cubes for p in itertools.combinations(c, 2)
             if abs(p[0][0] - p[1][0]) + abs(p[0][1] - p[1][1]) == 1}
    return assemble(verts, [tuple(e) for e in edges], cubes)


def tree(n, seed):
    g = nx.random_labeled_tree(n, seed=seed) if hasattr(nx, "random_labeled_tree") else nx.random_tree(n, seed=seed)
    return assemble(sorted(g.nodes), list(g.edges))


def grid_path_oracle(u, v):
    """Closed-form normal cube path between vertices of a full box."""
    cubes = [frozenset([u])]
    cur = u
    while cur != v:
        nxt = tuple(a + (b > a) - (b < a) for a, b in zip(cur, v))
        dirs = [i for i in range(len(u)) if nxt[i] != cur[i]]
        cube = frozenset(tuple(cur[i] + (nxt[i] - cur[i]) * bits[dirs.index(i)] if i in dirs else cur[i]
                               for i in range(len(u)))
                         for bits in itertools.product((0, 1), repeat=len(dirs)))
        cubes += [cube, frozenset([nxt])]
        cur = nxt
    return tuple(cubes)


# -- validation ---------------------------------------------------------------

def test_square_assembles_with_faces():
    cx = assemble("abcd", [("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")], ["abcd"])
    assert cx.dim == 2 and len(cx) == 9
    assert validate(cx) == []


@pytest.mark.parametrize(
    "cube",
    [["a", "b", "c"], ["a", "b", "c", "x"], ["a", "c", "b", "d"][:2] + ["b"]],
)
def test_bad_cubes_rejected(cube):
    with pytest.raises(CubeComplexError):
        assemble("abcdx", [("a", "b"), ("b", "c"), ("c", "d"), ("d", "a"), ("a", "c")][:4], [cube])


def test_dangling_edge_rejected():
    with pytest.raises(CubeComplexError, match="dangling"):
        assemble("ab", [("a", "z")])


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(1, 3), min_size=1, max_size=3))
def test_box_cubes_are_hypercubes(sizes):
    cx = box(*[n + 1 for n in sizes])
    for c in cx.all_cubes():
        if len(c) == 1:
            continue
        sub = nx.Graph([tuple(e) for e in cx.cube_edges(c)])
        assert nx.is_isomorphic(sub, nx.hypercube_graph(cube_dim(c)))
    assert cx.dim == len(sizes)
    assert validate(cx) == []


# -- links ------------------------------------------------------------------

def test_flag_links_grid_and_hollow_cube():
    assert check_flag_links(box(3, 3)) == (True, None)
    cube = box(2, 2, 2)
    hollow = assemble(cube.vertices, cube.edges, [c for c in cube.all_cubes() if cube_dim(c) == 2])
    ok, v = check_flag_links(hollow)
    assert not ok and v in hollow.vertices
    assert check_flag_links(cube) == (True, None)


def test_star_of_grid_centre():
    cx = box(3, 3)
    assert len(star(cx, [(1, 1)])) == 9


# -- hyperplanes and medians ------------------------------------------------

@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(1, 4), min_size=1, max_size=4).map(lambda r: sorted(r, reverse=True)))
def test_young_diagram_hyperplanes(rows):
    cx = young(rows)
    planes = hyperplanes(cx)
    assert len(planes) == rows[0] + len(rows)
    g = nx.Graph([tuple(e) for e in cx.edges])
    for h in planes:
        assert h.separates
        cut = g.copy()
        cut.remove_edges_from(tuple(e) for e in h.edges)
        assert nx.number_connected_components(cut) == 2
    assert check_flag_links(cx) == (True, None)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(1, 4), min_size=1, max_size=4).map(lambda r: sorted(r, reverse=True)), st.data())
def test_young_median_brute_force(rows, data):
    cx = young(rows)
    verts = list(cx.vertices)
    u, v, w = (data.draw(st.sampled_from(verts)) for _ in range(3))
    m = median(cx, u, v, w)
    # coordinatewise median is an oracle in any convex subcomplex of the plane
    assert m == tuple(sorted(t)[1] for t in zip(u, v, w))


def test_median_fails_on_cycle():
    cx = assemble(range(6), [(i, (i + 1) % 6) for i in range(6)])
    with pytest.raises(MedianError):
        median(cx, 0, 2, 4)


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 25), st.integers(0, 10_000), st.data())
def test_tree_intervals_are_geodesics(n, seed, data):
    cx = tree(n, seed)
    u = data.draw(st.sampled_from(cx.vertices))
    v = data.draw(st.sampled_from(cx.vertices))
    assert len(interval(cx, u, v)) == cx.distances_from([u])[v] + 1


# -- normal cube paths ------------------------------------------------------

def test_square_normal_path():
    cx = box(2, 2)
    path = normal_cube_path(cx, [(0, 0)], [(1, 1)]).cubes
    assert path == (frozenset([(0, 0)]), frozenset(cx.vertices), frozenset([(1, 1)]))


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(2, 4), min_size=1, max_size=3), st.data())
def test_box_paths_match_closed_form(sizes, data):
    cx = box(*sizes)
    u = data.draw(st.sampled_from(cx.vertices))
    v = data.draw(st.sampled_from(cx.vertices))
    path = normal_cube_path(cx, [u], [v]).cubes
    assert path == grid_path_oracle(u, v)
    assert is_normal_path(cx, path)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(1, 3), min_size=1, max_size=3).map(lambda r: sorted(r, reverse=True)), st.data())
def test_young_paths_normal_and_unique(rows, data):
    cx = young(rows)
    cubes = cx.all_cubes()
    a = data.draw(st.sampled_from(cubes))
    b = data.draw(st.sampled_from(cubes))
    path = normal_cube_path(cx, a, b).cubes
    assert path[0] == a and path[-1] == b
    assert is_normal_path(cx, path)
    assert enumerate_normal_paths(cx, a, b, len(path) + 2) == [path]


def test_hull_certification_on_truncated_core():
    from cubestab.median import TruncationError
    cx = box(4, 4)
    core = {v for v in cx.vertices if 0 < v[0] < 3 and 0 < v[1] < 3}
    assert convex_hull(cx, [(1, 1)], [(2, 2)], core) == frozenset(core)
    with pytest.raises(TruncationError):
        convex_hull(cx, [(1, 1)], [(3, 2)], core)


def test_non_normal_path_rejected():
    cx = box(3, 1)
    good = normal_cube_path(cx, [(0, 0)], [(2, 0)]).cubes
    assert is_normal_path(cx, good)
    wobble = (frozenset([(0, 0)]), frozenset([(0, 0), (1, 0)]), frozenset([(0, 0)]),
              frozenset([(0, 0), (1, 0)]), frozenset([(1, 0)]), frozenset([(1, 0), (2, 0)]), frozenset([(2, 0)]))
    assert not is_normal_path(cx, wobble)


def test_dot_output_lists_edges():
    text = to_dot(box(2, 2), label=str, name="sq")
    assert text.startswith("graph sq {") and text.count("--") == 4
