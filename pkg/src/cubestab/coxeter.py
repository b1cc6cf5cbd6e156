"""Coxeter and Artin system descriptions.

A :class:`CoxeterSystem` stores the generator set ``S`` together with the
symmetric labels ``m_st``.  The same object describes the Artin group
``A_S`` and the Coxeter group ``W_S``; only the questions asked differ.

Finite type is recognised by matching each connected component of the
Coxeter diagram against the finite-type templates.  A small Todd-Coxeter
coset enumerator is kept alongside as an independent oracle.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Iterable

import networkx as nx


class _Infinity:
    """Sentinel for ``m_st = oo``.  Never compared as a number."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()

#: Soft limit on |S| for the exhaustive clique scans.
MAX_GENERATORS = 24


class CoxeterParseError(ValueError):
    pass


def _pair(s, t):
    return frozenset((s, t))


@dataclass(frozen=True)
class CoxeterSystem:
    generators: tuple[str, ...]
    labels: dict = field(hash=False, compare=True)

    def __post_init__(self):
        gens = self.generators
        if len(set(gens)) != len(gens):
            raise CoxeterParseError("generators: duplicate generator name")
        for s, t in itertools.combinations(gens, 2):
            m = self.labels.get(_pair(s, t))
            if m is None:
                raise CoxeterParseError(f"labels: missing label for pair ({s}, {t})")
            if m is not INF and (not isinstance(m, int) or m < 2):
                raise CoxeterParseError(f"labels: label for ({s}, {t}) must be >= 2 or inf, got {m!r}")
        for key in self.labels:
            if len(key) != 2 or not key <= set(gens):
                raise CoxeterParseError(f"labels: bad pair {sorted(key)}")

    def m(self, s, t):
        return self.labels[_pair(s, t)]

    @property
    def index(self):
        return {s: i for i, s in enumerate(self.generators)}

    def sort(self, subset: Iterable[str]) -> tuple[str, ...]:
        idx = self.index
        return tuple(sorted(subset, key=idx.__getitem__))

    def is_right_angled(self):
        return all(m is INF or m == 2 for m in self.labels.values())

    def is_free(self):
        return all(m is INF for m in self.labels.values())

    def to_json(self):
        labels = []
        for s, t in itertools.combinations(self.generators, 2):
            m = self.m(s, t)
            labels.append({"pair": [s, t], "m": "inf" if m is INF else m})
        return {"generators": list(self.generators), "labels": labels}


def make_system(generators, labels=None, default=INF) -> CoxeterSystem:
    """Build a system from ``{(s, t): m}``; unlisted pairs get ``default``."""
    labels = labels or {}
    full = {}
    for (s, t), m in labels.items():
        full[_pair(s, t)] = m
    for s, t in itertools.combinations(generators, 2):
        full.setdefault(_pair(s, t), default)
    return CoxeterSystem(tuple(generators), full)


def _parse_label(value, where):
    if isinstance(value, str):
        if value.strip().lower() in ("inf", "infinity", "oo"):
            return INF
        raise CoxeterParseError(f"{where}: unrecognised label {value!r}")
    if isinstance(value, bool) or not isinstance(value, int):
        raise CoxeterParseError(f"{where}: label must be an integer or 'inf', got {value!r}")
    if value < 2:
        raise CoxeterParseError(f"{where}: label must be >= 2, got {value}")
    return value


def parse_coxeter(text) -> CoxeterSystem:
    """Parse the JSON system description (a string or an already-loaded dict)."""
    if isinstance(text, (str, bytes)):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise CoxeterParseError(f"malformed JSON: {exc}") from None
    else:
        data = text
    if not isinstance(data, dict):
        raise CoxeterParseError("top level must be an object")
    gens = data.get("generators")
    if not isinstance(gens, list) or not all(isinstance(g, str) for g in gens):
        raise CoxeterParseError("generators: expected a list of names")
    if len(set(gens)) != len(gens):
        raise CoxeterParseError("generators: duplicate generator name")
    default = INF
    if "default_m" in data:
        default = _parse_label(data["default_m"], "default_m")
    labels = {}
    for i, entry in enumerate(data.get("labels", [])):
        where = f"labels[{i}]"
        if not isinstance(entry, dict) or "pair" not in entry:
            raise CoxeterParseError(f"{where}: expected {{'pair': [s, t], 'm': ...}}")
        pair = entry["pair"]
        if not isinstance(pair, list) or len(pair) != 2:
            raise CoxeterParseError(f"{where}.pair: expected two generator names")
        s, t = pair
        if s not in gens or t not in gens:
            raise CoxeterParseError(f"{where}.pair: unknown generator in {pair}")
        if s == t:
            raise CoxeterParseError(f"{where}.pair: no label on ({s}, {s})")
        m = _parse_label(entry.get("m", "inf"), f"{where}.m")
        key = _pair(s, t)
        if key in labels and labels[key] != m:
            raise CoxeterParseError(f"{where}: asymmetric labels for ({s}, {t})")
        labels[key] = m
    for s, t in itertools.combinations(gens, 2):
        labels.setdefault(_pair(s, t), default)
    return CoxeterSystem(tuple(gens), labels)


# -- finite type recognition ------------------------------------------------

def _path(n, weights=None):
    g = nx.path_graph(n)
    weights = weights or [3] * (n - 1)
    for i, w in enumerate(weights):
        g.edges[i, i + 1]["m"] = w
    return g


def _branched(arms):
    """Star-shaped tree: centre 0 with arms of the given lengths, all labels 3."""
    g = nx.Graph()
    g.add_node(0)
    nxt = 1
    for length in arms:
        prev = 0
        for _ in range(length):
            g.add_edge(prev, nxt, m=3)
            prev = nxt
            nxt += 1
    return g


def _templates(n):
    """Finite-type connected diagrams on ``n >= 3`` nodes."""
    out = [("A%d" % n, _path(n))]
    out.append(("B%d" % n, _path(n, [3] * (n - 2) + [4])))
    if n >= 4:
        out.append(("D%d" % n, _branched([1, 1, n - 3])))
    if n in (6, 7, 8):
        out.append(("E%d" % n, _branched([1, 2, n - 4])))
    if n == 4:
        out.append(("F4", _path(4, [3, 4, 3])))
        out.append(("H4", _path(4, [5, 3, 3])))
    if n == 3:
        out.append(("H3", _path(3, [5, 3])))
    return out


def _signature(g):
    return (
        sorted(d for _, d in g.degree()),
        sorted(m for _, _, m in g.edges(data="m")),
    )


def component_type(diagram: nx.Graph):
    """Name of the finite type of a connected diagram, or ``None``."""
    n = diagram.number_of_nodes()
    if any(m is INF for _, _, m in diagram.edges(data="m")):
        return None
    if n == 1:
        return "A1"
    if n == 2:
        (m,) = [m for _, _, m in diagram.edges(data="m")]
        return "A2" if m == 3 else f"I2({m})"
    if diagram.number_of_edges() != n - 1:
        return None
    sig = _signature(diagram)
    for name, tmpl in _templates(n):
        if _signature(tmpl) != sig:
            continue
        if nx.is_isomorphic(diagram, tmpl, edge_match=lambda a, b: a["m"] == b["m"]):
            return name
    return None


def diagram(sys: CoxeterSystem, subset) -> nx.Graph:
    g = nx.Graph()
    g.add_nodes_from(subset)
    for s, t in itertools.combinations(sys.sort(subset), 2):
        m = sys.m(s, t)
        if m is INF or m >= 3:
            g.add_edge(s, t, m=m)
    return g


def _check_subset(sys, subset):
    subset = frozenset(subset)
    if not subset <= set(sys.generators):
        raise ValueError(f"subset {sorted(subset)} not contained in generators")
    return subset


def classify(sys: CoxeterSystem, subset) -> list | None:
    """Component types of ``W_subset``, or ``None`` if some component is not of finite type."""
    subset = _check_subset(sys, subset)
    d = diagram(sys, subset)
    names = []
    for comp in sorted(nx.connected_components(d), key=lambda c: min(sys.index[s] for s in c)):
        name = component_type(d.subgraph(comp))
        if name is None:
            return None
        names.append(name)
    return names


def is_spherical(sys: CoxeterSystem, subset) -> bool:
    return classify(sys, subset) is not None


def _finite_label_cliques(sys):
    """Cliques of the finite-label graph, by size then generator order."""
    gens = sys.generators
    idx = sys.index
    level = [()]
    yield ()
    while level:
        nxt = []
        for clique in level:
            start = idx[clique[-1]] + 1 if clique else 0
            for t in gens[start:]:
                if all(sys.m(s, t) is not INF for s in clique):
                    nxt.append(clique + (t,))
        yield from nxt
        level = nxt


def is_fc(sys: CoxeterSystem):
    """``(True, None)`` or ``(False, witness)`` with the smallest non-spherical clique."""
    for clique in _finite_label_cliques(sys):
        if not is_spherical(sys, clique):
            return False, clique
    return True, None


@dataclass(frozen=True)
class SphericalSubsetPoset:
    subsets: tuple[frozenset, ...]
    covers: tuple[tuple[frozenset, frozenset], ...]

    def __contains__(self, subset):
        return frozenset(subset) in set(self.subsets)

    def __len__(self):
        return len(self.subsets)

    def largest(self):
        return max(len(s) for s in self.subsets)


def spherical_subsets(sys: CoxeterSystem) -> SphericalSubsetPoset:
    idx = sys.index
    found = {frozenset()}
    level = [frozenset()]
    while level:
        candidates = {sub | {t} for sub in level for t in sys.generators if t not in sub}
        # downward closure lets us skip sets with a non-spherical facet
        level = [
            cand for cand in candidates
            if all(cand - {s} in found for s in cand) and is_spherical(sys, cand)
        ]
        found.update(level)
    found = list(found)
    found.sort(key=lambda s: (len(s), sorted(idx[x] for x in s)))
    covers = tuple(
        (a, b) for b in found for a in found if len(a) + 1 == len(b) and a < b
    )
    return SphericalSubsetPoset(tuple(found), covers)


# -- Todd-Coxeter -----------------------------------------------------------

EXCEEDED = "exceeded"


def enumerate_coxeter(sys: CoxeterSystem, subset, cap: int):
    """Order of ``W_subset`` by HLT coset enumeration over the trivial subgroup.

    ``cap`` bounds the number of cosets ever defined; returns ``EXCEEDED``
    when the enumeration would need more.
    """
    if cap < 1:
        raise ValueError("cap must be positive")
    subset = _check_subset(sys, subset)
    gens = sys.sort(subset)
    n = len(gens)
    relators = []
    for i, j in itertools.combinations(range(n), 2):
        m = sys.m(gens[i], gens[j])
        if m is not INF:
            relators.append((i, j) * m)
    # every generator is an involution, so column x is its own inverse column
    table = [[None] * n]
    parent = [0]
    defined = 1

    def rep(c):
        root = c
        while parent[root] != root:
            root = parent[root]
        while parent[c] != root:
            parent[c], c = root, parent[c]
        return root

    def merge(a, b, queue):
        a, b = rep(a), rep(b)
        if a != b:
            lo, hi = min(a, b), max(a, b)
            parent[hi] = lo
            queue.append(hi)

    def coincidence(a, b):
        queue = []
        merge(a, b, queue)
        i = 0
        while i < len(queue):
            e = queue[i]
            i += 1
            for x in range(n):
                f = table[e][x]
                if f is None:
                    continue
                if table[f][x] == e:
                    table[f][x] = None
                table[e][x] = None
                e1, f1 = rep(e), rep(f)
                if table[e1][x] is not None:
                    merge(f1, table[e1][x], queue)
                elif table[f1][x] is not None:
                    merge(e1, table[f1][x], queue)
                else:
                    table[e1][x] = f1
                    table[f1][x] = e1

    def define(c, x):
        nonlocal defined
        if defined >= cap:
            raise _CapHit
        defined += 1
        new = len(table)
        table.append([None] * n)
        parent.append(new)
        table[c][x] = new
        table[new][x] = c

    def scan_and_fill(c, word):
        f = b = c
        i, j = 0, len(word) - 1
        while True:
            while i <= j and table[f][word[i]] is not None:
                f = table[f][word[i]]
                i += 1
            if i > j:
                if f != b:
                    coincidence(f, b)
                return
            while j >= i and table[b][word[j]] is not None:
                b = table[b][word[j]]
                j -= 1
            if j < i:
                coincidence(f, b)
                return
            if i == j:
                table[f][word[i]] = b
                table[b][word[i]] = f
                return
            define(f, word[i])

    try:
        c = 0
        while c < len(table):
            if parent[c] == c:
                for word in relators:
                    if parent[c] != c:
                        break
                    scan_and_fill(c, word)
                if parent[c] == c:
                    for x in range(n):
                        if table[c][x] is None:
                            define(c, x)
            c += 1
    except _CapHit:
        return EXCEEDED
    return sum(1 for c in range(len(table)) if parent[c] == c)


class _CapHit(Exception):
    pass
