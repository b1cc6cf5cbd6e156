"""Checks of the stabiliser conditions on finite portions of group actions.

Every checker takes an *action* object.  The Davis balls of
:mod:`cubestab.graphprod`, the free-product Deligne balls of
:mod:`cubestab.deligne` and :class:`PermutationAction` all provide

* ``complex``, ``interior`` (cubes whose stars are fully stored), ``core``;
* ``stabiliser(cube)`` returning an object with ``&``, ``<=`` and ``==``;
* ``describe(cube)`` / ``describe_group(stab)`` for reports.

Finite actions also provide ``identity``, ``multiply``, ``element_key`` and
``act_vertex``, which the fixed-set checks need.

All statements are checked on interior cubes only.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .graphprod import FiniteSubgroup
from .median import TruncationError, assemble, cube_dim, normal_cube_path, star


class NoFixedPointError(ValueError):
    pass


def intersect(a: FiniteSubgroup, b: FiniteSubgroup) -> FiniteSubgroup:
    return a & b


class PermutationAction:
    """A finite group of vertex permutations acting on an assembled complex."""

    def __init__(self, complex, generators):
        self.complex = complex
        verts = complex.vertices
        n = len(verts)
        gens = []
        for g in generators:
            perm = tuple(complex.index[g[v]] for v in verts)
            if sorted(perm) != list(range(n)):
                raise ValueError("generator is not a permutation of the vertices")
            gens.append(perm)
        self.identity = tuple(range(n))
        elements = {self.identity}
        frontier = [self.identity]
        while frontier:
            nxt = []
            for g in frontier:
                for s in gens:
                    h = self.multiply(s, g)
                    if h not in elements:
                        elements.add(h)
                        nxt.append(h)
            frontier = nxt
        self.elements = sorted(elements)
        for g in self.elements:
            for c in complex.all_cubes():
                if frozenset(verts[g[complex.index[v]]] for v in c) not in complex:
                    raise ValueError("group does not act by cubical automorphisms")
        self.interior = frozenset(complex.all_cubes())
        self.core = frozenset(verts)
        self._stab = {}

    @classmethod
    def from_json(cls, data):
        verts = data["vertices"]
        cx = assemble(verts, [tuple(e) for e in data["edges"]], [tuple(c) for c in data.get("cubes", [])])
        lookup = {str(v): v for v in verts}
        gens = [{lookup[k]: lookup[str(v)] for k, v in g.items()} for g in data.get("generators", [])]
        return cls(cx, gens)

    @property
    def dim(self):
        return self.complex.dim

    def multiply(self, g, h):
        """``g * h``: apply ``h`` first."""
        return tuple(g[i] for i in h)

    def element_key(self, g):
        return g

    def act_vertex(self, g, v):
        return self.complex.vertices[g[self.complex.index[v]]]

    def star_complete(self, cube):
        return True

    def stabiliser(self, cube):
        got = self._stab.get(cube)
        if got is None:
            got = FiniteSubgroup(frozenset(
                g for g in self.elements
                if all(self.act_vertex(g, v) in cube for v in cube)
            ))
            self._stab[cube] = got
        return got

    def describe(self, cube):
        return {"vertices": sorted(cube, key=self.complex.index.__getitem__)}

    def describe_group(self, grp):
        return [list(g) for g in grp.sorted()]

    def vertex_label(self, v):
        return str(v)


def _find_witness(action, cube, target):
    for d in star(action.complex, cube):
        if action.stabiliser(d) == target:
            return d
    return None


def _pair_key(action, c, d):
    return (action.complex.key(c), action.complex.key(d))


@dataclass
class StarReport:
    checked_pairs: int = 0
    witnesses: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)
    skipped: int = 0

    @property
    def ok(self):
        return not self.violations

    def to_json(self, action, full=True):
        def pair(c, d):
            return {"C": action.describe(c), "C_prime": action.describe(d)}

        out = {
            "checked_pairs": self.checked_pairs,
            "skipped": self.skipped,
            "violation_count": len(self.violations),
            "holds": self.ok,
            "violations": [],
        }
        for c, d in self.violations:
            entry = pair(c, d)
            entry["stab_C"] = action.describe_group(action.stabiliser(c))
            entry["stab_C_prime"] = action.describe_group(action.stabiliser(d))
            entry["star_C"] = [
                {"cube": action.describe(x), "stab": action.describe_group(action.stabiliser(x))}
                for x in star(action.complex, c)
            ]
            out["violations"].append(entry)
        if full:
            out["witnesses"] = []
            for (c, d), w in sorted(self.witnesses.items(), key=lambda kv: _pair_key(action, *kv[0])):
                entry = pair(c, d)
                entry["D"] = action.describe(w)
                entry["stab_D"] = action.describe_group(action.stabiliser(w))
                out["witnesses"].append(entry)
        return out


def _ordered_cubes(action):
    cx = action.complex
    return sorted(action.interior, key=cx.key)


def check_property_star(action) -> StarReport:
    """For intersecting interior cubes ``C, C'`` look for ``D >= C`` with ``Stab(D) = Stab(C) & Stab(C')``."""
    cx = action.complex
    report = StarReport()
    for c in _ordered_cubes(action):
        near = {d for v in c for d in cx.cubes_at(v)}
        for d in sorted(near, key=cx.key):
            if d not in action.interior:
                report.skipped += 1
                continue
            report.checked_pairs += 1
            target = action.stabiliser(c) & action.stabiliser(d)
            w = _find_witness(action, c, target)
            if w is None:
                report.violations.append((c, d))
            else:
                report.witnesses[(c, d)] = w
    return report


@dataclass
class DisjointRecord:
    source: frozenset
    target: frozenset
    path: tuple
    inductive: frozenset | None
    brute: frozenset | None
    agree: bool
    note: str = ""


@dataclass
class DisjointStarReport:
    records: list = field(default_factory=list)
    skipped: int = 0
    skip_reasons: dict = field(default_factory=dict)

    @property
    def checked_pairs(self):
        return len(self.records)

    @property
    def disagreements(self):
        return [r for r in self.records if not r.agree]

    @property
    def ok(self):
        return not self.disagreements

    def to_json(self, action, full=True):
        out = {
            "checked_pairs": self.checked_pairs,
            "skipped": self.skipped,
            "skip_reasons": dict(sorted(self.skip_reasons.items())),
            "disagreement_count": len(self.disagreements),
            "holds": self.ok,
        }
        rows = self.records if full else self.disagreements
        out["pairs"] = [
            {
                "C": action.describe(r.source),
                "C_prime": action.describe(r.target),
                "path_length": len(r.path) - 1,
                "path": [action.describe(c) for c in r.path],
                "D_inductive": None if r.inductive is None else action.describe(r.inductive),
                "D_search": None if r.brute is None else action.describe(r.brute),
                "agree": r.agree,
                "note": r.note,
            }
            for r in rows
        ]
        return out


def inductive_witness(action, path):
    """Run the downward induction along a normal cube path ``C_0 .. C_k``.

    Returns ``(D_0, note)``; ``D_0`` is ``None`` when a step finds no cube.
    """
    k = len(path) - 1
    last = action.stabiliser(path[k])
    d_next = None
    for m in range(k - 1, -1, -1):
        cm = path[m]
        stab_m = action.stabiliser(cm)
        if not (stab_m & last) <= action.stabiliser(path[m + 1]):
            return None, f"Stab(C_{m}) & Stab(C_k) not inside Stab(C_{m + 1})"
        other = last if m == k - 1 else action.stabiliser(d_next)
        d_next = _find_witness(action, cm, stab_m & other)
        if d_next is None:
            return None, f"no cube over C_{m} realises the intersection"
    return d_next, ""


def check_disjoint_star(action, limit=None) -> DisjointStarReport:
    """Compare the path induction with a direct star search on disjoint interior pairs.

    A pair is skipped when its convex hull is not certified inside the
    stored ball, or when some cube of its normal path has an incomplete star.
    """
    cx = action.complex
    report = DisjointStarReport()
    cubes = _ordered_cubes(action)

    def skip(reason):
        report.skipped += 1
        report.skip_reasons[reason] = report.skip_reasons.get(reason, 0) + 1

    for c, d in itertools.product(cubes, cubes):
        if c & d:
            continue
        if limit is not None and report.checked_pairs >= limit:
            skip("limit")
            continue
        try:
            path = normal_cube_path(cx, c, d, core=action.core).cubes
        except TruncationError:
            skip("hull outside ball")
            continue
        if not all(action.star_complete(x) for x in path):
            skip("path star incomplete")
            continue
        d_ind, note = inductive_witness(action, path)
        target = action.stabiliser(c) & action.stabiliser(d)
        d_brute = _find_witness(action, c, target)
        agree = (
            d_ind is not None and d_brute is not None
            and action.stabiliser(d_ind) == target and c <= d_ind
        )
        report.records.append(DisjointRecord(c, d, path, d_ind, d_brute, agree, note))
    return report


def poset_height(items, lt, rank=len):
    """Longest strict chain (number of elements) and one chain realising it.

    ``rank`` must strictly increase along ``lt``.
    """
    items = sorted(items, key=rank)
    best = [1] * len(items)
    prev = [None] * len(items)
    for i, a in enumerate(items):
        for j in range(i):
            if best[j] + 1 > best[i] and lt(items[j], a):
                best[i], prev[i] = best[j] + 1, j
    if not items:
        return 0, []
    top = max(range(len(items)), key=lambda i: (best[i], -i))
    chain = []
    while top is not None:
        chain.append(items[top])
        top = prev[top]
    return len(chain), chain[::-1]


@dataclass
class StabiliserPoset:
    elements: list
    order: list  # (i, j) with elements[i] < elements[j]
    height: int
    chain: list
    dim: int

    @property
    def within_bound(self):
        return self.height <= self.dim + 1

    def to_json(self, action):
        return {
            "size": len(self.elements),
            "height": self.height,
            "dim": self.dim,
            "bound": self.dim + 1,
            "within_bound": self.within_bound,
            "chain": [action.describe_group(p) for p in self.chain],
        }


def stabiliser_poset(action) -> StabiliserPoset:
    seen = {}
    for c in _ordered_cubes(action):
        s = action.stabiliser(c)
        seen.setdefault(s, None)
    rank = getattr(action, "stab_rank", len)
    elements = sorted(seen, key=lambda s: (rank(s), action.describe_group(s)))
    order = [
        (i, j) for i, a in enumerate(elements) for j, b in enumerate(elements)
        if i != j and a <= b and a != b
    ]
    height, chain = poset_height(elements, lambda a, b: a <= b and a != b, rank)
    return StabiliserPoset(elements, order, height, chain, action.complex.dim)


# -- fixed sets -------------------------------------------------------------

@dataclass(frozen=True)
class FixedSet:
    cubes: frozenset

    def __len__(self):
        return len(self.cubes)


def fix_set(action, H: FiniteSubgroup, cubes=None) -> FixedSet:
    """Cubes all of whose vertices are fixed by every element of ``H``."""
    cx = action.complex
    fixed_vertex = {}

    def fixed(v):
        got = fixed_vertex.get(v)
        if got is None:
            got = fixed_vertex[v] = all(action.act_vertex(g, v) == v for g in H.elements)
        return got

    pool = cx.all_cubes() if cubes is None else cubes
    return FixedSet(frozenset(c for c in pool if all(fixed(v) for v in c)))


def p_of_h(action, H: FiniteSubgroup) -> FiniteSubgroup:
    """Intersection of the interior-cube stabilisers that contain ``H``."""
    family = {action.stabiliser(c) for c in action.interior}
    containing = [s for s in family if H <= s]
    if not containing:
        raise NoFixedPointError("H fixes no interior cube of the ball")
    out = containing[0]
    for s in containing[1:]:
        out = out & s
    return out


def subgroups(action, group: FiniteSubgroup) -> list[FiniteSubgroup]:
    """Every subgroup of a finite group, by closure of generating sets."""
    mul = action.multiply

    def closure(gens):
        elems = {action.identity}
        frontier = [action.identity]
        while frontier:
            nxt = []
            for g in frontier:
                for s in gens:
                    h = mul(g, s)
                    if h not in elems:
                        elems.add(h)
                        nxt.append(h)
            frontier = nxt
        return frozenset(elems)

    found = {closure(())}
    frontier = list(found)
    elements = group.sorted(key=action.element_key)
    while frontier:
        nxt = []
        for sub in frontier:
            for x in elements:
                if x not in sub:
                    bigger = closure(tuple(sub) + (x,))
                    if bigger not in found:
                        found.add(bigger)
                        nxt.append(bigger)
        frontier = nxt
    return sorted((FiniteSubgroup(s) for s in found), key=lambda s: (len(s), s.sorted(key=action.element_key)))


def _all_test_subgroups(action):
    stabs = {action.stabiliser(c) for c in action.interior}
    out = {}
    for s in sorted(stabs, key=lambda s: (len(s), s.sorted(key=action.element_key))):
        for h in subgroups(action, s):
            out.setdefault(h, None)
    return list(out)


@dataclass
class FixLemmaReport:
    checked: int = 0
    failures: list = field(default_factory=list)
    outside_poset: int = 0

    @property
    def ok(self):
        return not self.failures

    def to_json(self, action):
        return {
            "checked_subgroups": self.checked,
            "failure_count": len(self.failures),
            "holds": self.ok,
            "p_h_not_a_stabiliser": self.outside_poset,
            "failures": [
                {
                    "H": action.describe_group(h),
                    "P_H": action.describe_group(p),
                    "reason": why,
                }
                for h, p, why in self.failures
            ],
        }


def check_fix_lemma(action) -> FixLemmaReport:
    """``Fix(H) = Fix(P_H)`` on interior cubes, for all subgroups of interior stabilisers."""
    interior = sorted(action.interior, key=action.complex.key)
    family = {action.stabiliser(c) for c in interior}
    report = FixLemmaReport()
    for h in _all_test_subgroups(action):
        report.checked += 1
        p = p_of_h(action, h)
        if p not in family:
            report.outside_poset += 1
        if not h <= p:
            report.failures.append((h, p, "H not inside P_H"))
            continue
        bad = [c for c in interior if h <= action.stabiliser(c) and not p <= action.stabiliser(c)]
        if bad:
            report.failures.append((h, p, "P_H not inside a stabiliser containing H"))
            continue
        if fix_set(action, h, interior) != fix_set(action, p, interior):
            report.failures.append((h, p, "Fix(H) != Fix(P_H)"))
    return report


@dataclass
class ChainReport:
    fixed_sets: int
    height: int
    dim: int
    chain_sizes: list

    @property
    def ok(self):
        return self.height <= self.dim + 1

    def to_json(self, action=None):
        return {
            "fixed_set_count": self.fixed_sets,
            "height": self.height,
            "dim": self.dim,
            "bound": self.dim + 1,
            "within_bound": self.ok,
            "chain_sizes": self.chain_sizes,
        }


def chain_condition_demo(action) -> ChainReport:
    """Height of the poset of fixed sets of subgroups of interior stabilisers."""
    interior = sorted(action.interior, key=action.complex.key)
    sets = {fix_set(action, h, interior).cubes for h in _all_test_subgroups(action)}
    sets = sorted(sets, key=lambda s: (len(s), sorted(action.complex.key(c) for c in s)))
    height, chain = poset_height(sets, lambda a, b: a < b)
    return ChainReport(len(sets), height, action.complex.dim, [len(s) for s in chain[::-1]])
