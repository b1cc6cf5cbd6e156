"""Deligne cube complexes of FC Artin groups.

Stabilisers here are infinite, so they are handled symbolically as
:class:`ParabolicLabel` values ``g A_T g^-1``.  Intersections of such labels
are delegated to an intersection oracle.  Only the free-product oracle
(all labels infinite) and the identity-conjugator rule
``A_S' & A_S'' = A_(S' & S'')`` are implemented here; anything more general
plugs in through the same ``query`` method.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Protocol

from .coxeter import CoxeterSystem, is_fc, spherical_subsets
from .median import assemble, cube_dim

FreeWord = tuple  # tuple[tuple[str, int], ...], letters (generator, +-1)


class NotFCError(ValueError):
    def __init__(self, witness):
        super().__init__(f"system is not of type FC; non-spherical clique {list(witness)}")
        self.witness = tuple(witness)


class OracleContractError(ValueError):
    pass


def free_reduce(letters) -> FreeWord:
    out = []
    for g, e in letters:
        if out and out[-1][0] == g and out[-1][1] == -e:
            out.pop()
        else:
            out.append((g, e))
    return tuple(out)


def free_mul(*words) -> FreeWord:
    return free_reduce(itertools.chain.from_iterable(words))


def free_inv(w) -> FreeWord:
    return tuple((g, -e) for g, e in reversed(w))


def free_power(s, k) -> FreeWord:
    return tuple((s, 1 if k > 0 else -1) for _ in range(abs(k)))


def format_free(w) -> str:
    if not w:
        return "1"
    parts = []
    for g, grp in itertools.groupby(w, key=lambda x: x):
        k = len(list(grp))
        parts.append(g[0] if k * g[1] == 1 else f"{g[0]}^{k * g[1]}")
    return "*".join(parts)


def free_coset_rep(w, subset) -> FreeWord:
    """Shortest element of ``w A_subset`` for a free group and ``|subset| <= 1``."""
    w = list(w)
    while w and w[-1][0] in subset:
        w.pop()
    return tuple(w)


@dataclass(frozen=True)
class ParabolicLabel:
    conjugator: tuple
    subset: frozenset

    @property
    def is_trivial(self):
        return not self.subset

    def format(self):
        return f"{format_free(self.conjugator)} A{{{','.join(sorted(self.subset))}}}"


TRIVIAL = ParabolicLabel((), frozenset())


class IntersectionOracle(Protocol):
    def query(self, first: frozenset, g, second: frozenset) -> ParabolicLabel:
        """Label ``(h, T)`` with ``A_first & g A_second g^-1 = h A_T h^-1``."""


def checked_query(oracle, first, g, second) -> ParabolicLabel:
    first, second = frozenset(first), frozenset(second)
    label = oracle.query(first, g, second)
    if not label.subset <= first:
        raise OracleContractError(
            f"oracle returned subset {sorted(label.subset)} outside {sorted(first)}"
        )
    return label


class FreeProductOracle:
    """``<s> & g <t> g^-1`` in a free group: nontrivial iff ``s == t`` and ``g`` is a power of ``s``."""

    def __init__(self, sys: CoxeterSystem):
        if not sys.is_free():
            raise ValueError("free-product oracle needs every label to be infinite")
        self.sys = sys

    def query(self, first, g, second):
        first, second = frozenset(first), frozenset(second)
        if len(first) > 1 or len(second) > 1:
            raise OracleContractError("free-product oracle only answers for singletons and the empty set")
        if not first or not second or first != second:
            return TRIVIAL
        (s,) = first
        g = free_reduce(g)
        if all(x == s for x, _ in g):
            return ParabolicLabel((), first)
        return TRIVIAL


class StandardParabolicOracle:
    """``A_S' & A_S'' = A_(S' & S'')``; only answers for the identity conjugator."""

    def query(self, first, g, second):
        if free_reduce(g):
            raise OracleContractError("standard-parabolic oracle needs the identity conjugator")
        return ParabolicLabel((), frozenset(first) & frozenset(second))


# -- fundamental domain -----------------------------------------------------

@dataclass(frozen=True, order=True)
class DomainCube:
    s1: tuple
    s2: tuple

    @property
    def dim(self):
        return len(self.s2) - len(self.s1)

    def vertices(self):
        extra = [x for x in self.s2 if x not in self.s1]
        for r in range(len(extra) + 1):
            for add in itertools.combinations(extra, r):
                yield frozenset(self.s1) | set(add)

    def meets(self, other):
        return set(self.s1) | set(other.s1) <= set(self.s2) & set(other.s2)

    def contains(self, other):
        return set(self.s1) <= set(other.s1) and set(other.s2) <= set(self.s2)


@dataclass(frozen=True)
class FundamentalDomain:
    sys: CoxeterSystem
    cubes: tuple
    dim: int

    def to_json(self):
        return {
            "dim": self.dim,
            "cube_count": len(self.cubes),
            "cubes": [{"S1": list(c.s1), "S2": list(c.s2), "dim": c.dim} for c in self.cubes],
        }


def build_fundamental_domain(sys: CoxeterSystem) -> FundamentalDomain:
    ok, witness = is_fc(sys)
    if not ok:
        raise NotFCError(witness)
    poset = spherical_subsets(sys)
    cubes = []
    for s2 in poset.subsets:
        for r in range(len(s2) + 1):
            for s1 in itertools.combinations(sys.sort(s2), r):
                cubes.append(DomainCube(tuple(s1), sys.sort(s2)))
    idx = sys.index
    cubes.sort(key=lambda c: (c.dim, [idx[x] for x in c.s1], [idx[x] for x in c.s2]))
    return FundamentalDomain(sys, tuple(cubes), poset.largest())


def standard_label_height(domain: FundamentalDomain) -> int:
    """Height of ``{A_S1}`` over the domain's cubes, ordered by inclusion of ``S1``."""
    from .stabposet import poset_height

    labels = sorted({frozenset(c.s1) for c in domain.cubes}, key=len)
    return poset_height(labels, lambda a, b: a < b)[0]


# -- formal property (*) ----------------------------------------------------

@dataclass
class FormalStarReport:
    entries: list = field(default_factory=list)
    violations: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations

    def to_json(self):
        return {
            "checked": len(self.entries),
            "violation_count": len(self.violations),
            "holds": self.ok,
            "violations": self.violations,
            "entries": self.entries,
        }


def _token_in(token, subset):
    return all(x in subset for x, _ in free_reduce(token))


def formal_property_star(sys, oracle, sample) -> FormalStarReport:
    """Check the reduction of (*) to parabolic intersections on sample triples.

    Each triple ``(C, g, C')`` stands for the standard cube ``C`` and the
    translate ``g C'``.  With ``Stab(C) = A_S1`` and ``Stab(gC') =
    g A_S1' g^-1`` the oracle labels the intersection ``(h, T)``; the cube
    ``D = h (T, S2)`` must contain ``C``, which needs ``T <= S1`` and ``h`` in
    ``A_S1``.
    """
    report = FormalStarReport()
    for c, g, c2 in sample:
        entry = {
            "C": {"S1": list(c.s1), "S2": list(c.s2)},
            "g": format_free(g),
            "C_prime": {"S1": list(c2.s1), "S2": list(c2.s2)},
        }
        try:
            label = checked_query(oracle, c.s1, g, c2.s1)
        except OracleContractError as exc:
            entry["error"] = str(exc)
            report.violations.append(entry)
            report.entries.append(entry)
            continue
        entry["label"] = label.format()
        problems = []
        if not _token_in(label.conjugator, c.s1):
            problems.append("conjugator not in A_S1")
        d = DomainCube(sys.sort(label.subset), c.s2)
        if not d.contains(c):
            problems.append("D does not contain C")
        entry["D"] = {"h": format_free(label.conjugator), "S1": list(d.s1), "S2": list(d.s2)}
        if problems:
            entry["error"] = "; ".join(problems)
            report.violations.append(entry)
        report.entries.append(entry)
    return report


def domain_sample(domain: FundamentalDomain):
    """All ordered pairs of intersecting domain cubes, identity conjugator."""
    return [(c, (), d) for c in domain.cubes for d in domain.cubes if c.meets(d)]


# -- explicit ball for free groups ------------------------------------------

@dataclass(frozen=True)
class SymbolicStab:
    label: ParabolicLabel
    oracle: object = field(compare=False, hash=False, repr=False)

    def __and__(self, other):
        a, b = self.label, other.label
        if a.is_trivial or b.is_trivial:
            return SymbolicStab(TRIVIAL, self.oracle)
        token = free_mul(free_inv(a.conjugator), b.conjugator)
        got = checked_query(self.oracle, a.subset, token, b.subset)
        if got.is_trivial:
            return SymbolicStab(TRIVIAL, self.oracle)
        conj = free_coset_rep(free_mul(a.conjugator, got.conjugator), got.subset)
        return SymbolicStab(ParabolicLabel(conj, got.subset), self.oracle)

    def __le__(self, other):
        return self.label.is_trivial or self.label == other.label

    def __len__(self):
        return len(self.label.subset)


def _free_words(gens, radius):
    words = [()]
    level = [()]
    for _ in range(radius):
        nxt = []
        for w in level:
            for g in gens:
                for e in (1, -1):
                    if w and w[-1] == (g, -e):
                        continue
                    nxt.append(w + ((g, e),))
        words.extend(nxt)
        level = nxt
    return words


class DeligneFreeBall:
    """Ball of the Deligne complex of a free group: the Bass-Serre tree of ``*_s <s>``."""

    def __init__(self, sys: CoxeterSystem, radius: int):
        if not sys.is_free():
            raise ValueError("explicit Deligne balls need every label to be infinite")
        if radius < 1:
            raise ValueError("radius must be at least 1")
        self.sys = sys
        self.radius = radius
        self.oracle = FreeProductOracle(sys)
        elements = _free_words(sys.generators, radius)
        labels = [(w, frozenset()) for w in elements]
        seen = set(labels)
        for w in elements:
            for s in sys.generators:
                lab = (free_coset_rep(w, {s}), frozenset([s]))
                if lab not in seen:
                    seen.add(lab)
                    labels.append(lab)
        idx = sys.index

        def key(lab):
            w, sub = lab
            return (len(w), [(idx[g], -e) for g, e in w], sorted(idx[x] for x in sub))

        labels.sort(key=key)
        self.labels = dict(enumerate(labels))
        self.vertex_of = {lab: i for i, lab in self.labels.items()}
        edges = []
        self.cube_data = {}
        for i, (w, sub) in self.labels.items():
            self.cube_data[frozenset([i])] = (w, sub, sub)
            if sub:
                continue
            for s in sys.generators:
                j = self.vertex_of[(free_coset_rep(w, {s}), frozenset([s]))]
                edges.append((i, j))
                self.cube_data[frozenset((i, j))] = (w, frozenset(), frozenset([s]))
        self.complex = assemble(range(len(labels)), edges)
        self.interior = frozenset(self.complex.all_cubes())
        # coset vertices have infinitely many neighbours
        self.core = frozenset(i for i, (_, sub) in self.labels.items() if not sub)

    @property
    def dim(self):
        return self.complex.dim

    def star_complete(self, cube):
        return True

    def stabiliser(self, cube):
        w, s1, _ = self.cube_data[cube]
        if not s1:
            return SymbolicStab(TRIVIAL, self.oracle)
        return SymbolicStab(ParabolicLabel(w, s1), self.oracle)

    def stab_rank(self, stab):
        return len(stab.label.subset)

    def vertex_label(self, v):
        w, sub = self.labels[v]
        return f"{format_free(w)}A{{{','.join(sorted(sub))}}}"

    def describe(self, cube):
        w, s1, s2 = self.cube_data[cube]
        return {
            "g": format_free(w),
            "S1": self.sys.sort(s1),
            "S2": self.sys.sort(s2),
            "vertices": sorted(self.vertex_label(v) for v in cube),
        }

    def describe_group(self, stab):
        return [stab.label.format()]

    def to_json(self):
        return {
            "radius": self.radius,
            "dim": self.dim,
            "vertex_count": len(self.complex.vertices),
            "edge_count": len(self.complex.edges),
            "vertices": [self.vertex_label(v) for v in self.complex.vertices],
            "edges": [self.describe(c) for c in self.complex.all_cubes() if cube_dim(c) == 1],
        }


def build_deligne_ball_free(sys: CoxeterSystem, radius: int) -> DeligneFreeBall:
    return DeligneFreeBall(sys, radius)


def ball_sample(ball: DeligneFreeBall):
    """Every ordered pair of intersecting cubes, translated so the first is standard."""
    cx = ball.complex
    out = []
    for c in cx.all_cubes():
        gc, s1, s2 = ball.cube_data[c]
        near = {d for v in c for d in cx.cubes_at(v)}
        for d in sorted(near, key=cx.key):
            gd, t1, t2 = ball.cube_data[d]
            token = free_mul(free_inv(gc), gd)
            out.append((
                DomainCube(ball.sys.sort(s1), ball.sys.sort(s2)),
                token,
                DomainCube(ball.sys.sort(t1), ball.sys.sort(t2)),
                (c, d),
            ))
    return out


def free_formal_star(ball: DeligneFreeBall) -> FormalStarReport:
    """Formal (*) over the exhaustive ball sample, cross-checked against the ball itself.

    The cube ``D`` produced from the oracle label is translated back into the
    ball and must be present, contain ``C`` and carry the intersected
    stabiliser.
    """
    sample = ball_sample(ball)
    report = formal_property_star(ball.sys, ball.oracle, [s[:3] for s in sample])
    for (cstd, token, dstd, (c, d)), entry in zip(sample, report.entries):
        if "error" in entry:
            continue
        gc = ball.cube_data[c][0]
        label = checked_query(ball.oracle, cstd.s1, token, dstd.s1)
        h = free_mul(gc, label.conjugator)
        t = label.subset
        verts = [(free_coset_rep(h, sub), sub) for sub in DomainCube(ball.sys.sort(t), cstd.s2).vertices()]
        ids = [ball.vertex_of.get(v) for v in verts]
        if None in ids:
            entry["error"] = "D leaves the ball"
        else:
            cube = frozenset(ids)
            want = ball.stabiliser(c) & ball.stabiliser(d)
            if cube not in ball.complex or not c <= cube:
                entry["error"] = "D is not a cube over C"
            elif ball.stabiliser(cube) != want:
                entry["error"] = "Stab(D) differs from the intersection"
        if "error" in entry:
            report.violations.append(entry)
    return report


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2)
