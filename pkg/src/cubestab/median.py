"""Finite cube complexes: validation, links, hyperplanes, medians, normal cube paths.

Cubes are frozensets of vertex ids; two cubes are equal iff their vertex
sets are.  Vertex ids only need to be hashable; the order in which they are
handed to :func:`assemble` fixes every tie-break and every report ordering.
"""
from __future__ import annotations

import itertools
import json
from collections import deque
from dataclasses import dataclass

import networkx as nx

Cube = frozenset


class CubeComplexError(ValueError):
    pass


class MedianError(ValueError):
    pass


class TruncationError(RuntimeError):
    """A computation needed part of the complex that lies outside the stored ball."""


def cube_dim(cube) -> int:
    return len(cube).bit_length() - 1


def _cube_coordinates(vertices, adj):
    """Map the vertices of a k-cube graph to subsets of range(k), or ``None``.

    ``adj`` is the adjacency restricted to ``vertices``.
    """
    n = len(vertices)
    k = n.bit_length() - 1
    if n != 1 << k:
        return None
    if any(len(adj[v]) != k for v in vertices):
        return None
    base = vertices[0]
    coords = {base: frozenset()}
    for i, u in enumerate(adj[base]):
        coords[u] = frozenset([i])
    frontier = list(adj[base])
    dist = {base: 0, **{u: 1 for u in adj[base]}}
    while frontier:
        nxt = []
        for v in frontier:
            for w in adj[v]:
                if w not in dist:
                    dist[w] = dist[v] + 1
                    nxt.append(w)
        for w in nxt:
            down = [u for u in adj[w] if dist.get(u) == dist[w] - 1]
            coords[w] = frozenset().union(*(coords[u] for u in down))
        frontier = nxt
    if len(coords) != n or len(set(coords.values())) != n:
        return None
    for v, c in coords.items():
        if len(c) != dist[v]:
            return None
        for w in adj[v]:
            if len(c ^ coords[w]) != 1:
                return None
    return coords


def _faces(coords):
    k = max((len(c) for c in coords.values()), default=0)
    dirs = range(k)
    out = set()
    for free_size in range(k + 1):
        for free in itertools.combinations(dirs, free_size):
            fixed = [d for d in dirs if d not in free]
            free = frozenset(free)
            for r in range(len(fixed) + 1):
                for ones in itertools.combinations(fixed, r):
                    ones = frozenset(ones)
                    out.add(frozenset(v for v, c in coords.items() if c - free == ones))
    return out


class CubeComplex:
    """Immutable finite cube complex with all faces stored."""

    def __init__(self, vertices, edges, cubes):
        self.vertices = tuple(vertices)
        self.index = {v: i for i, v in enumerate(self.vertices)}
        self.edges = frozenset(edges)
        self.cubes = {d: frozenset(cs) for d, cs in cubes.items() if cs}
        self.dim = max(self.cubes, default=-1)
        self.adj = {v: set() for v in self.vertices}
        for e in self.edges:
            a, b = tuple(e)
            self.adj[a].add(b)
            self.adj[b].add(a)
        self._at = {v: [] for v in self.vertices}
        for cs in self.cubes.values():
            for c in cs:
                for v in c:
                    self._at[v].append(c)
        for v in self._at:
            self._at[v].sort(key=self.key)
        self._dist_cache = {}

    def key(self, cube):
        return (len(cube), sorted(self.index[v] for v in cube))

    def all_cubes(self):
        return sorted((c for cs in self.cubes.values() for c in cs), key=self.key)

    def cubes_at(self, v):
        return self._at[v]

    def __contains__(self, cube):
        return cube in self.cubes.get(cube_dim(cube), ())

    def __len__(self):
        return sum(len(cs) for cs in self.cubes.values())

    def distances_from(self, sources):
        """BFS distances in the 1-skeleton from a set of vertices (cached)."""
        sources = frozenset(sources)
        got = self._dist_cache.get(sources)
        if got is not None:
            return got
        dist = {v: 0 for v in sources}
        queue = deque(sources)
        while queue:
            v = queue.popleft()
            for w in self.adj[v]:
                if w not in dist:
                    dist[w] = dist[v] + 1
                    queue.append(w)
        if len(self._dist_cache) > 4096:
            self._dist_cache.clear()
        self._dist_cache[sources] = dist
        return dist

    def cube_edges(self, cube):
        return [e for e in map(frozenset, itertools.combinations(cube, 2)) if e in self.edges]

    def to_json(self, label=repr):
        return {
            "dim": self.dim,
            "cubes": {
                str(d): [sorted(label(v) for v in c) for c in sorted(cs, key=self.key)]
                for d, cs in sorted(self.cubes.items())
            },
        }


def assemble(vertices, edges, cubes=()) -> CubeComplex:
    """Validate a vertex/edge/cube listing and materialise all faces."""
    vertices = list(vertices)
    vset = set(vertices)
    if len(vset) != len(vertices):
        raise CubeComplexError("duplicate vertex id")
    edge_set = set()
    for e in edges:
        e = frozenset(e)
        if len(e) != 2:
            raise CubeComplexError(f"edge {sorted(e, key=repr)} is not a pair of distinct vertices")
        if not e <= vset:
            raise CubeComplexError(f"edge {sorted(e, key=repr)} has a dangling endpoint")
        edge_set.add(e)
    adj = {v: set() for v in vertices}
    for e in edge_set:
        a, b = tuple(e)
        adj[a].add(b)
        adj[b].add(a)
    stored = {0: {frozenset([v]) for v in vertices}, 1: set(edge_set)}
    for cube in cubes:
        cube = frozenset(cube)
        if not cube <= vset:
            raise CubeComplexError(f"cube {sorted(cube, key=repr)} has a vertex outside the complex")
        sub = {v: adj[v] & cube for v in cube}
        coords = _cube_coordinates(list(cube), sub)
        if coords is None:
            raise CubeComplexError(f"cube {sorted(cube, key=repr)} does not induce a cube graph")
        for face in _faces(coords):
            stored.setdefault(cube_dim(face), set()).add(face)
    return CubeComplex(vertices, edge_set, stored)


def validate(cx: CubeComplex) -> list[str]:
    """Independent re-check of a stored complex; returns a list of problems."""
    problems = []
    for d, cs in cx.cubes.items():
        for c in cs:
            if len(c) != 1 << d:
                problems.append(f"cube {sorted(c, key=repr)} has wrong size for dim {d}")
                continue
            sub = {v: cx.adj[v] & c for v in c}
            coords = _cube_coordinates(list(c), sub)
            if coords is None:
                problems.append(f"cube {sorted(c, key=repr)} is not a cube graph")
                continue
            for face in _faces(coords):
                if face not in cx:
                    problems.append(f"face {sorted(face, key=repr)} missing")
    if cx.cubes.get(1, frozenset()) != cx.edges:
        problems.append("1-cubes differ from edges")
    return problems


def star(cx: CubeComplex, cube) -> list:
    """All cubes containing ``cube``, itself included."""
    cube = frozenset(cube)
    v = next(iter(cube))
    return [c for c in cx.cubes_at(v) if cube <= c]


def link_graph(cx: CubeComplex, v):
    """1-skeleton of the link of ``v``: neighbours joined when they span a square at ``v``."""
    g = nx.Graph()
    g.add_nodes_from(cx.adj[v])
    for c in cx.cubes_at(v):
        if len(c) == 4:
            a, b = [u for u in c if u in cx.adj[v]]
            g.add_edge(a, b)
    return g


def check_flag_links(cx: CubeComplex, vertices=None):
    """``(True, None)`` if every link is flag, else ``(False, first bad vertex)``."""
    for v in (cx.vertices if vertices is None else vertices):
        spans = {frozenset(c & cx.adj[v]) for c in cx.cubes_at(v)}
        for clique in nx.find_cliques(link_graph(cx, v)):
            if frozenset(clique) not in spans:
                return False, v
    return True, None


@dataclass(frozen=True)
class Hyperplane:
    id: int
    edges: frozenset
    halves: tuple | None  # (side containing the first vertex of the first edge, other side)

    @property
    def separates(self):
        return self.halves is not None

    def side(self, v):
        return 0 if v in self.halves[0] else 1


def _square_pairs(cx, cubes):
    for c in cubes:
        if len(c) != 4:
            continue
        es = cx.cube_edges(c)
        for e, f in itertools.combinations(es, 2):
            if not e & f:
                yield e, f


def hyperplanes(cx: CubeComplex, vertices=None) -> list[Hyperplane]:
    """Parallelism classes of edges, with their two halves when the class separates.

    With ``vertices`` given, works in the full subcomplex spanned by them.
    """
    if vertices is None:
        vset = set(cx.vertices)
        edges = cx.edges
        squares = cx.cubes.get(2, ())
    else:
        vset = set(vertices)
        edges = {frozenset((v, w)) for v in vset for w in cx.adj[v] if w in vset}
        squares = {c for v in vset for c in cx.cubes_at(v) if len(c) == 4 and c <= vset}
    parent = {e: e for e in edges}

    def find(e):
        while parent[e] != e:
            parent[e] = parent[parent[e]]
            e = parent[e]
        return e

    for e, f in _square_pairs(cx, squares):
        a, b = find(e), find(f)
        if a != b:
            parent[a] = b
    classes = {}
    for e in edges:
        classes.setdefault(find(e), set()).add(e)

    def ekey(e):
        return sorted(cx.index[v] for v in e)

    ordered = sorted((sorted(c, key=ekey) for c in classes.values()), key=lambda c: ekey(c[0]))
    out = []
    for i, cls in enumerate(ordered):
        cut = set(cls)
        first = min(cls[0], key=cx.index.__getitem__)
        seen = {first}
        queue = deque([first])
        while queue:
            v = queue.popleft()
            for w in cx.adj[v]:
                if w in vset and w not in seen and frozenset((v, w)) not in cut:
                    seen.add(w)
                    queue.append(w)
        other = vset - seen
        ok = all(len(e & seen) == 1 for e in cls) and other
        halves = (frozenset(seen), frozenset(other)) if ok else None
        out.append(Hyperplane(i, frozenset(cls), halves))
    return out


def interval(cx: CubeComplex, u, v):
    du = cx.distances_from([u])
    dv = cx.distances_from([v])
    if v not in du:
        raise MedianError("vertices lie in different components")
    d = du[v]
    return {x for x in du if x in dv and du[x] + dv[x] == d}


def median(cx: CubeComplex, u, v, w):
    common = interval(cx, u, v) & interval(cx, v, w) & interval(cx, u, w)
    if len(common) != 1:
        raise MedianError(f"{len(common)} candidate medians for ({u!r}, {v!r}, {w!r})")
    return next(iter(common))


# -- normal cube paths ------------------------------------------------------

def convex_hull(cx: CubeComplex, a, b, core=None) -> frozenset:
    """Vertex set of the convex hull of two cubes, certified against truncation.

    ``core`` is the set of vertices whose full neighbourhood (in the ambient
    CAT(0) complex) is present in ``cx``; ``None`` means every vertex.  The
    hull is grown from a geodesic by closing under intervals of vertex pairs
    at distance two.  A connected, locally convex set of a median graph is
    convex, so the result is the true hull as long as it stays in ``core``.
    """
    a, b = frozenset(a), frozenset(b)
    start = min(a, key=cx.index.__getitem__)
    dist = cx.distances_from(b)
    if start not in dist:
        raise TruncationError("cubes lie in different components of the stored complex")
    hull = set(a) | set(b)
    v = start
    while dist[v] > 0:
        v = min((w for w in cx.adj[v] if dist.get(w, -1) == dist[v] - 1), key=cx.index.__getitem__)
        hull.add(v)
    queue = deque(hull)
    while queue:
        x = queue.popleft()
        if core is not None and x not in core:
            raise TruncationError(f"hull reaches vertex {x!r} whose neighbourhood is incomplete")
        for m in cx.adj[x]:
            for y in cx.adj[m]:
                if y == x or y not in hull or y in cx.adj[x]:
                    continue
                for z in cx.adj[x] & cx.adj[y]:
                    if z not in hull:
                        hull.add(z)
                        queue.append(z)
    return frozenset(hull)


@dataclass(frozen=True)
class NormalCubePath:
    cubes: tuple

    def __len__(self):
        return len(self.cubes) - 1


def _hull_cubes(cx, hull):
    by_vertex = {}
    for v in hull:
        for c in cx.cubes_at(v):
            if c <= hull:
                by_vertex.setdefault(v, []).append(c)
    return by_vertex


def normal_cube_path(cx: CubeComplex, source, target, core=None) -> NormalCubePath:
    """The normal cube path from ``source`` to ``target``, built from hyperplanes of the hull.

    Each step from the current cube ``A``:

    * ``A`` meets ``target``: step to ``target``;
    * some hyperplane crossing ``A`` misses ``target``: step down to the face
      of ``A`` on the target side of all such hyperplanes;
    * otherwise step up to the cube spanned by ``A`` and the hyperplanes that
      separate ``A`` from ``target`` and are adjacent to ``A``.
    """
    source, target = frozenset(source), frozenset(target)
    if source not in cx or target not in cx:
        raise CubeComplexError("endpoints must be cubes of the complex")
    path = [source]
    if source == target:
        return NormalCubePath(tuple(path))
    hull = convex_hull(cx, source, target, core)
    planes = hyperplanes(cx, hull)
    edge_plane = {}
    for h in planes:
        if not h.separates:
            raise TruncationError("hull subcomplex has a non-separating hyperplane")
        for e in h.edges:
            edge_plane[e] = h
    tside = {}
    for h in planes:
        sides = {h.side(v) for v in target}
        tside[h.id] = sides.pop() if len(sides) == 1 else None
    local = _hull_cubes(cx, hull)
    current = source
    while True:
        if current & target:
            path.append(target)
            return NormalCubePath(tuple(path))
        crossing = {edge_plane[e] for e in cx.cube_edges(current)}
        missing = [h for h in crossing if tside[h.id] is not None]
        if missing:
            nxt = frozenset(v for v in current if all(h.side(v) == tside[h.id] for h in missing))
        else:
            adjacent = set()
            for v in current:
                for w in cx.adj[v]:
                    if w in hull and w not in current:
                        h = edge_plane[frozenset((v, w))]
                        if tside[h.id] is not None and h.side(v) != tside[h.id]:
                            adjacent.add(h.id)
            want = {h.id for h in crossing} | adjacent
            found = [
                c for c in local[min(current, key=cx.index.__getitem__)]
                if current <= c and {edge_plane[e].id for e in cx.cube_edges(c)} == want
            ]
            if len(found) != 1:
                raise CubeComplexError("no cube spans the separating hyperplanes; link is not flag")
            nxt = found[0]
        if nxt not in cx:
            raise CubeComplexError("step produced a vertex set that is not a cube")
        path.append(nxt)
        current = nxt
        if len(path) > 4 * len(hull) + 4:
            raise CubeComplexError("normal cube path failed to terminate")


def _step_is_normal(cx, prev, nxt, target, dist):
    """Distance-only normality test for one step toward ``target``."""
    if prev & target:
        return nxt == target
    d_prev = {v: dist[v] for v in prev}
    if nxt < prev:
        best = min(d_prev.values())
        return nxt == frozenset(v for v, d in d_prev.items() if d == best)
    if not prev < nxt:
        return False
    if len(set(d_prev.values())) != 1:
        return False
    base = next(iter(d_prev.values()))

    def descending(c):
        drop = cube_dim(c) - cube_dim(prev)
        return min(dist.get(v, 1 << 30) for v in c) == base - drop

    if not descending(nxt):
        return False
    for c in star(cx, prev):
        if c != nxt and descending(c) and not c <= nxt:
            return False
    return True


def is_normal_path(cx: CubeComplex, cubes) -> bool:
    cubes = [frozenset(c) for c in cubes]
    target = cubes[-1]
    dist = cx.distances_from(target)
    for prev, nxt in zip(cubes, cubes[1:]):
        if prev == nxt or not prev & nxt:
            return False
        if not _step_is_normal(cx, prev, nxt, target, dist):
            return False
    return True


def enumerate_normal_paths(cx: CubeComplex, source, target, max_length):
    """All cube paths of length ``<= max_length`` from ``source`` to ``target`` that are normal.

    Exhaustive depth-first search over cube sequences with consecutive
    cubes intersecting; a prefix is abandoned as soon as a step fails the
    distance-based normality test, which only looks at that step.
    """
    source, target = frozenset(source), frozenset(target)
    dist = cx.distances_from(target)
    found = []
    if source == target:
        found.append((source,))

    def neighbours(c):
        seen = set()
        for v in c:
            for d in cx.cubes_at(v):
                if d not in seen and d != c:
                    seen.add(d)
                    yield d

    def dfs(path):
        if len(path) - 1 >= max_length:
            return
        cur = path[-1]
        for nxt in neighbours(cur):
            if not _step_is_normal(cx, cur, nxt, target, dist):
                continue
            if nxt == target:
                found.append(tuple(path) + (nxt,))
            else:
                path.append(nxt)
                dfs(path)
                path.pop()

    if source != target:
        dfs([source])
    return found


def to_dot(cx: CubeComplex, label=str, name="complex") -> str:
    planes = hyperplanes(cx) if cx.edges else []
    colour = {}
    for h in planes:
        for e in h.edges:
            colour[e] = h.id
    lines = [f"graph {name} {{"]
    for v in cx.vertices:
        lines.append(f'  n{cx.index[v]} [label="{label(v)}"];')
    for e in sorted(cx.edges, key=lambda e: sorted(cx.index[v] for v in e)):
        a, b = sorted(e, key=cx.index.__getitem__)
        lines.append(f'  n{cx.index[a]} -- n{cx.index[b]} [colorscheme=set312, color={colour[e] % 12 + 1}, hyperplane={colour[e]}];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def dumps(cx: CubeComplex, label=repr) -> str:
    return json.dumps(cx.to_json(label), sort_keys=True, indent=2)
