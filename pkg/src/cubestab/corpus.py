"""Small graph products and handcrafted actions used by the experiments and tests."""
from .graphprod import parse_graph_product, symmetric_group_table


def _cyc(name, n):
    return {"name": name, "group": {"cyclic": n}}


GRAPH_PRODUCTS = {
    "dihedral": {"vertices": [_cyc("a", 2), _cyc("b", 2)], "edges": []},
    "k2": {"vertices": [_cyc("a", 2), _cyc("b", 2)], "edges": [["a", "b"]]},
    "z3_free_z2": {"vertices": [_cyc("a", 3), _cyc("b", 2)], "edges": []},
    "path3": {
        "vertices": [_cyc("a", 2), _cyc("b", 2), _cyc("c", 2)],
        "edges": [["a", "b"], ["b", "c"]],
    },
    "cycle4": {
        "vertices": [_cyc("a", 2), _cyc("b", 2), _cyc("c", 2), _cyc("d", 2)],
        "edges": [["a", "b"], ["b", "c"], ["c", "d"], ["d", "a"]],
    },
    "sym3": {
        "vertices": [
            {"name": "s", "group": {"table": symmetric_group_table(3)}},
            _cyc("t", 2),
            _cyc("u", 3),
        ],
        "edges": [["s", "t"]],
    },
}


def graph_product(name):
    return parse_graph_product(GRAPH_PRODUCTS[name])


# Two squares glued along the edge {0, 1}; the involution flips that edge and
# maps each square to itself.  Every cube containing the shared edge is
# stabilised by the whole group while the vertex 0 has trivial stabiliser.
STAR_VIOLATION = {
    "vertices": [0, 1, 2, 3, 4, 5],
    "edges": [[0, 1], [1, 3], [3, 2], [2, 0], [1, 5], [5, 4], [4, 0]],
    "cubes": [[0, 1, 2, 3], [0, 1, 4, 5]],
    "generators": [{"0": 1, "1": 0, "2": 3, "3": 2, "4": 5, "5": 4}],
}

COXETER = {
    "dihedral3": {"generators": ["s", "t"], "labels": [{"pair": ["s", "t"], "m": 3}]},
    "free2": {"generators": ["s", "t"], "labels": []},
    "free3": {"generators": ["s", "t", "u"], "labels": []},
    "triangle333": {
        "generators": ["a", "b", "c"],
        "labels": [
            {"pair": ["a", "b"], "m": 3},
            {"pair": ["b", "c"], "m": 3},
            {"pair": ["a", "c"], "m": 3},
        ],
    },
    "fc_square": {
        "generators": ["a", "b", "c", "d"],
        "labels": [
            {"pair": ["a", "b"], "m": 3},
            {"pair": ["b", "c"], "m": 2},
            {"pair": ["c", "d"], "m": 4},
            {"pair": ["a", "d"], "m": 2},
        ],
    },
}
