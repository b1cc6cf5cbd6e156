"""Graph products of finite groups and equivariant balls in their Davis complexes.

Group elements are :data:`NormalWord` tuples of syllables ``(vertex, x)``
where ``x`` is a non-identity index into the vertex group's Cayley table.
Normal forms are reduced (no two syllables of one vertex can be shuffled
together) and, among the shuffles of a reduced word, lexicographically
least for the vertex order of the input.  Equality of group elements is
therefore tuple equality.
"""
from __future__ import annotations

import itertools
import json
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable

import networkx as nx

from .median import CubeComplex, assemble, cube_dim

NormalWord = tuple  # tuple[tuple[str, int], ...]

DEFAULT_VERTEX_CAP = 200_000


class GraphProductError(ValueError):
    pass


class ResourceCapExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class VertexGroup:
    """Finite group on ``0..n-1`` with identity 0, given by its Cayley table."""

    table: tuple[tuple[int, ...], ...]
    inverses: tuple[int, ...] = field(init=False, compare=False)

    def __post_init__(self):
        t = self.table
        n = len(t)
        if n == 0 or any(len(row) != n for row in t):
            raise GraphProductError("Cayley table must be square and non-empty")
        if any(not isinstance(x, int) or not 0 <= x < n for row in t for x in row):
            raise GraphProductError("Cayley table entries must be indices 0..n-1")
        if any(t[0][x] != x or t[x][0] != x for x in range(n)):
            raise GraphProductError("element 0 is not an identity")
        for x, y, z in itertools.product(range(n), repeat=3):
            if t[t[x][y]][z] != t[x][t[y][z]]:
                raise GraphProductError(f"Cayley table is not associative at ({x}, {y}, {z})")
        inv = []
        for x in range(n):
            ys = [y for y in range(n) if t[x][y] == 0]
            if len(ys) != 1 or t[ys[0]][x] != 0:
                raise GraphProductError(f"element {x} has no two-sided inverse")
            inv.append(ys[0])
        object.__setattr__(self, "inverses", tuple(inv))

    @classmethod
    def cyclic(cls, n):
        if n < 1:
            raise GraphProductError("cyclic order must be positive")
        return cls(tuple(tuple((i + j) % n for j in range(n)) for i in range(n)))

    @property
    def order(self):
        return len(self.table)

    def mul(self, x, y):
        return self.table[x][y]


def symmetric_group_table(n=3):
    """Cayley table of Sym(n), identity first, permutations in lexicographic order."""
    perms = list(itertools.permutations(range(n)))
    index = {p: i for i, p in enumerate(perms)}
    # (p * q)(i) = p(q(i)): apply q first
    return [[index[tuple(p[q[i]] for i in range(n))] for q in perms] for p in perms]


class GraphProductSystem:
    def __init__(self, vertices, edges, groups):
        self.vertices = tuple(vertices)
        if len(set(self.vertices)) != len(self.vertices):
            raise GraphProductError("duplicate vertex name")
        self.index = {v: i for i, v in enumerate(self.vertices)}
        self.adjacent = {v: set() for v in self.vertices}
        for e in edges:
            a, b = e
            if a not in self.index or b not in self.index:
                raise GraphProductError(f"edge ({a}, {b}) mentions an unknown vertex")
            if a == b:
                raise GraphProductError(f"loop at {a}")
            self.adjacent[a].add(b)
            self.adjacent[b].add(a)
        self.edges = frozenset(frozenset((a, b)) for a, b in edges)
        self.groups = dict(groups)
        if set(self.groups) != set(self.vertices):
            raise GraphProductError("every vertex needs exactly one group")
        g = nx.Graph()
        g.add_nodes_from(self.vertices)
        g.add_edges_from(tuple(e) for e in self.edges)
        self.cliques = sorted(
            [frozenset()] + [frozenset(c) for c in nx.enumerate_all_cliques(g)],
            key=self.clique_key,
        )

    def clique_key(self, clique):
        return (len(clique), sorted(self.index[v] for v in clique))

    def sort(self, vs):
        return sorted(vs, key=self.index.__getitem__)

    def commute(self, u, v):
        return v in self.adjacent[u]

    def is_clique(self, vs):
        vs = list(vs)
        return all(self.commute(a, b) for a, b in itertools.combinations(vs, 2)) and len(set(vs)) == len(vs)

    @property
    def dimension(self):
        return max(len(c) for c in self.cliques)

    def to_json(self):
        verts = []
        for v in self.vertices:
            verts.append({"name": v, "group": {"table": [list(r) for r in self.groups[v].table]}})
        edges = sorted(self.sort(e) for e in self.edges)
        return {"vertices": verts, "edges": edges}


def parse_graph_product(text) -> GraphProductSystem:
    if isinstance(text, (str, bytes)):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise GraphProductError(f"malformed JSON: {exc}") from None
    else:
        data = text
    if not isinstance(data, dict) or not isinstance(data.get("vertices"), list):
        raise GraphProductError("expected an object with a 'vertices' list")
    names, groups = [], {}
    for i, entry in enumerate(data["vertices"]):
        try:
            name = entry["name"]
            spec = entry["group"]
        except (TypeError, KeyError):
            raise GraphProductError(f"vertices[{i}]: need 'name' and 'group'") from None
        if "cyclic" in spec:
            groups[name] = VertexGroup.cyclic(int(spec["cyclic"]))
        elif "table" in spec:
            groups[name] = VertexGroup(tuple(tuple(row) for row in spec["table"]))
        elif "symmetric" in spec:
            groups[name] = VertexGroup(tuple(map(tuple, symmetric_group_table(int(spec["symmetric"])))))
        else:
            raise GraphProductError(f"vertices[{i}].group: expected 'cyclic', 'table' or 'symmetric'")
        names.append(name)
    edges = []
    for e in data.get("edges", []):
        if not isinstance(e, list) or len(e) != 2:
            raise GraphProductError(f"bad edge {e!r}")
        edges.append(tuple(e))
    return GraphProductSystem(names, edges, groups)


# -- normal forms -----------------------------------------------------------

def _append(sys, word: list, syl):
    """Right-multiply a reduced word (in place) by one syllable."""
    v, x = syl
    if x == 0:
        return
    for i in range(len(word) - 1, -1, -1):
        u, y = word[i]
        if u == v:
            z = sys.groups[v].mul(y, x)
            if z == 0:
                del word[i]
            else:
                word[i] = (v, z)
            return
        if not sys.commute(u, v):
            break
    word.append((v, x))


def _lex(sys, word) -> NormalWord:
    rest = list(word)
    out = []
    idx = sys.index
    while rest:
        best = None
        for i, (v, _) in enumerate(rest):
            if best is not None and idx[v] >= idx[rest[best][0]]:
                continue
            if all(sys.commute(v, rest[j][0]) for j in range(i)):
                best = i
        out.append(rest.pop(best))
    return tuple(out)


def normal_form(sys: GraphProductSystem, word: Iterable) -> NormalWord:
    out = []
    for syl in word:
        v, x = syl
        if v not in sys.groups or not 0 <= x < sys.groups[v].order:
            raise GraphProductError(f"invalid syllable {syl!r}")
        _append(sys, out, (v, x))
    return _lex(sys, out)


def multiply(sys, g: NormalWord, h: NormalWord) -> NormalWord:
    out = list(g)
    for syl in h:
        _append(sys, out, syl)
    return _lex(sys, out)


def invert(sys, g: NormalWord) -> NormalWord:
    return normal_form(sys, ((v, sys.groups[v].inverses[x]) for v, x in reversed(g)))


def conjugate(sys, g, h):
    """``g h g^-1``."""
    return multiply(sys, multiply(sys, g, h), invert(sys, g))


def coset_rep(sys, g: NormalWord, clique) -> NormalWord:
    """Shortest element of ``g * <clique>``."""
    clique = frozenset(clique)
    if not sys.is_clique(clique):
        raise GraphProductError(f"{sorted(clique)} is not a clique")
    word = list(g)
    i = len(word) - 1
    while i >= 0:
        v = word[i][0]
        if v in clique and all(sys.commute(v, u) for u, _ in word[i + 1:]):
            del word[i]
            i = len(word) - 1
        else:
            i -= 1
    return _lex(sys, word)


def clique_group(sys, clique) -> list[NormalWord]:
    """All elements of the direct product of the vertex groups of a clique."""
    vs = sys.sort(clique)
    out = []
    for xs in itertools.product(*(range(sys.groups[v].order) for v in vs)):
        out.append(tuple((v, x) for v, x in zip(vs, xs) if x))
    return sorted(out, key=lambda w: word_key(sys, w))


def word_key(sys, w):
    return (len(w), tuple((sys.index[v], x) for v, x in w))


def format_word(w) -> str:
    return "*".join(f"{v}^{x}" for v, x in w) if w else "1"


def elements_up_to(sys, length) -> list[NormalWord]:
    """Every element of syllable length at most ``length``, in word_key order."""
    level = [()]
    seen = {()}
    for ell in range(1, length + 1):
        nxt = []
        for g in level:
            for v in sys.vertices:
                for x in range(1, sys.groups[v].order):
                    h = multiply(sys, g, ((v, x),))
                    if len(h) == ell and h not in seen:
                        seen.add(h)
                        nxt.append(h)
        level = nxt
    return sorted(seen, key=lambda w: word_key(sys, w))


# -- Davis balls ------------------------------------------------------------

@dataclass(frozen=True, order=True)
class CosetVertex:
    rep: NormalWord
    clique: frozenset

    def label(self):
        lam = ",".join(sorted(self.clique))
        return f"{format_word(self.rep)}<{lam}>"


@dataclass(frozen=True)
class CubeData:
    g: NormalWord
    lambda1: frozenset
    lambda2: frozenset


@dataclass(frozen=True)
class FiniteSubgroup:
    """A finite subgroup given by its element set."""

    elements: frozenset

    def __and__(self, other):
        return FiniteSubgroup(self.elements & other.elements)

    def __le__(self, other):
        return self.elements <= other.elements

    def __lt__(self, other):
        return self.elements < other.elements

    def __contains__(self, g):
        return g in self.elements

    def __len__(self):
        return len(self.elements)

    @property
    def order(self):
        return len(self.elements)

    def sorted(self, key=None):
        return sorted(self.elements, key=key)


class EquivariantBall:
    """Finite ball in the Davis complex together with the action bookkeeping."""

    def __init__(self, sys, radius, margin, complex, labels, cube_data, depth):
        self.sys = sys
        self.radius = radius
        self.margin = margin
        self.complex: CubeComplex = complex
        self.labels: dict[int, CosetVertex] = labels
        self.vertex_of = {lab: v for v, lab in labels.items()}
        self.cube_data: dict = cube_data
        self.depth = depth
        self.core = frozenset(v for v, d in depth.items() if d > 0)
        need = margin + complex.dim
        self.interior = frozenset(
            c for c in complex.all_cubes() if min(depth[v] for v in c) >= need
        )
        self._stab = {}

    @property
    def dim(self):
        return self.complex.dim

    def star_complete(self, cube):
        return min(self.depth[v] for v in cube) >= self.complex.dim - cube_dim(cube)

    # group structure used by the generic checkers
    @property
    def identity(self):
        return ()

    def multiply(self, g, h):
        return multiply(self.sys, g, h)

    def element_key(self, g):
        return word_key(self.sys, g)

    def act_vertex(self, g, v):
        lab = self.labels[v]
        img = CosetVertex(coset_rep(self.sys, multiply(self.sys, g, lab.rep), lab.clique), lab.clique)
        return self.vertex_of.get(img)

    def stabiliser(self, cube):
        got = self._stab.get(cube)
        if got is None:
            got = self._stab[cube] = cube_stabiliser(self.sys, self, cube)
        return got

    def describe(self, cube):
        d = self.cube_data[cube]
        return {
            "g": format_word(d.g),
            "lambda1": self.sys.sort(d.lambda1),
            "lambda2": self.sys.sort(d.lambda2),
            "vertices": sorted(self.labels[v].label() for v in cube),
        }

    def describe_group(self, grp):
        return [format_word(w) for w in grp.sorted(key=self.element_key)]

    def vertex_label(self, v):
        return self.labels[v].label()

    def to_json(self):
        cubes = []
        for c in self.complex.all_cubes():
            entry = self.describe(c)
            entry["dim"] = cube_dim(c)
            entry["interior"] = c in self.interior
            cubes.append(entry)
        return {
            "radius": self.radius,
            "margin": self.margin,
            "dim": self.dim,
            "vertex_count": len(self.complex.vertices),
            "cube_count": len(self.complex),
            "interior_cube_count": len(self.interior),
            "vertices": [self.labels[v].label() for v in self.complex.vertices],
            "cubes": cubes,
        }


def _true_neighbours(sys, lab: CosetVertex):
    """Neighbours of a coset vertex in the full Davis complex."""
    out = []
    for v in sys.vertices:
        if v in lab.clique:
            smaller = lab.clique - {v}
            for x in range(sys.groups[v].order):
                h = multiply(sys, lab.rep, ((v, x),) if x else ())
                out.append(CosetVertex(coset_rep(sys, h, smaller), smaller))
        elif all(sys.commute(v, u) for u in lab.clique):
            bigger = lab.clique | {v}
            out.append(CosetVertex(coset_rep(sys, lab.rep, bigger), bigger))
    return out


def build_davis_ball(sys: GraphProductSystem, radius: int, margin: int = 2,
                     cap_vertices: int = DEFAULT_VERTEX_CAP) -> EquivariantBall:
    """All cosets ``g<Lambda>`` whose shortest representative has length ``<= radius``."""
    if radius < 1 or margin < 1:
        raise ValueError("radius and margin must be at least 1")
    elements = elements_up_to(sys, radius)
    labels = set()
    for g in elements:
        for lam in sys.cliques:
            labels.add(CosetVertex(coset_rep(sys, g, lam), lam))
            if len(labels) > cap_vertices:
                raise ResourceCapExceeded(f"more than {cap_vertices} vertices")
    ordered = sorted(labels, key=lambda c: (word_key(sys, c.rep), sys.clique_key(c.clique)))
    ids = {lab: i for i, lab in enumerate(ordered)}
    cubes = []
    cube_data = {}
    for lab in ordered:
        for lam2 in sys.cliques:
            if not lab.clique <= lam2:
                continue
            extra = sys.sort(lam2 - lab.clique)
            verts = []
            for r in range(len(extra) + 1):
                for add in itertools.combinations(extra, r):
                    lam = lab.clique | set(add)
                    verts.append(ids[CosetVertex(coset_rep(sys, lab.rep, lam), lam)])
            cube = frozenset(verts)
            cubes.append(cube)
            cube_data[cube] = CubeData(lab.rep, lab.clique, lam2)
    edges = [tuple(c) for c in cubes if len(c) == 2]
    complex = assemble(range(len(ordered)), edges, [c for c in cubes if len(c) > 2])
    assert all(c in cube_data for c in complex.all_cubes())
    labels_by_id = {i: lab for lab, i in ids.items()}
    boundary = [
        i for i, lab in labels_by_id.items()
        if any(n not in ids for n in _true_neighbours(sys, lab))
    ]
    depth = {i: float("inf") for i in labels_by_id}
    for i in boundary:
        depth[i] = 0
    queue = deque(boundary)
    while queue:
        v = queue.popleft()
        for w in complex.adj[v]:
            if depth[w] == float("inf"):
                depth[w] = depth[v] + 1
                queue.append(w)
    return EquivariantBall(sys, radius, margin, complex, labels_by_id, cube_data, depth)


def act(sys, ball: EquivariantBall, g: NormalWord, cube):
    """Image of a cube under left multiplication, or ``"outside"``."""
    out = []
    for v in cube:
        w = ball.act_vertex(g, v)
        if w is None:
            return "outside"
        out.append(w)
    return frozenset(out)


def cube_stabiliser(sys, ball: EquivariantBall, cube) -> FiniteSubgroup:
    """``g (prod of G_u over Lambda1) g^-1`` for the cube's data ``(g, Lambda1, Lambda2)``."""
    d = ball.cube_data[cube]
    ginv = invert(sys, d.g)
    return FiniteSubgroup(frozenset(
        multiply(sys, multiply(sys, d.g, k), ginv) for k in clique_group(sys, d.lambda1)
    ))


def brute_force_stabiliser(sys, ball: EquivariantBall, cube, length) -> FiniteSubgroup:
    """Setwise stabiliser among all elements of syllable length ``<= length``."""
    return FiniteSubgroup(frozenset(
        g for g in elements_up_to(sys, length) if act(sys, ball, g, cube) == cube
    ))


def ball_dumps(ball: EquivariantBall) -> str:
    return json.dumps(ball.to_json(), sort_keys=True, indent=2)
