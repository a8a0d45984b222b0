"""Relative homology of realized index pairs and the induced index map.

The index pair is realized as a one-dimensional complex: every lifted cell
with a nondegenerate feasibility interval is an edge, and two edges share an
end vertex exactly when they carry the same word and their feasibility
intervals meet.  Each connected component therefore carries a single word and
is an interval of the base line, which lets the index map be computed from
exact endpoint images.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

from sympy.polys.domains import ZZ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.normalforms import invariant_factors

from .index_pair import IndexPairC, RefinementNeeded
from .lifted import LiftedDigraph, feasibility
from .numerics import RatInterval

Vertex = tuple  # (point, word)


@dataclass
class OneComplex:
    vertices: set = field(default_factory=set)
    edges: dict = field(default_factory=dict)  # lifted vertex id -> (lo Vertex, hi Vertex)

    def components(self) -> list["Component"]:
        parent = {v: v for v in self.vertices}

        def find(v):
            while parent[v] != v:
                parent[v] = parent[parent[v]]
                v = parent[v]
            return v

        for lo, hi in self.edges.values():
            parent[find(lo)] = find(hi)
        groups = defaultdict(lambda: ([], []))
        for v in self.vertices:
            groups[find(v)][0].append(v)
        for eid, (lo, _) in self.edges.items():
            groups[find(lo)][1].append(eid)
        comps = []
        for verts, eids in groups.values():
            word = verts[0][1]
            pts = [p for p, _ in verts]
            comps.append(Component(word, RatInterval(min(pts), max(pts)), frozenset(verts), tuple(sorted(eids))))
        comps.sort(key=lambda c: (c.extent.lo, c.extent.hi, c.word))
        return comps


@dataclass(frozen=True)
class Component:
    word: tuple
    extent: RatInterval
    vertices: frozenset
    edges: tuple

    def describe(self) -> dict:
        return {"base": str(self.extent), "word": list(self.word)}


def realize(d: LiftedDigraph, p: IndexPairC) -> tuple[OneComplex, OneComplex]:
    """Complexes of P1 and of its subcomplex P0.

    Lifted cells whose feasibility set is a single point are left out: they
    are slices of breakpoints rather than pieces of the lifted line.
    """

    def build(ids):
        cx = OneComplex()
        for vid in ids:
            v = d.vertices[vid]
            if v.degenerate:
                continue
            lo, hi = (v.feas.lo, v.word), (v.feas.hi, v.word)
            cx.vertices.update((lo, hi))
            cx.edges[vid] = (lo, hi)
        return cx

    return build(sorted(p.p1)), build(sorted(p.p0))


def smith_normal_form(matrix: Sequence[Sequence[int]]) -> list[int]:
    """Nonzero invariant factors of an integer matrix (diagonal of its Smith form)."""
    rows = [list(map(int, row)) for row in matrix]
    if not rows or not rows[0]:
        return []
    factors = invariant_factors(DomainMatrix(rows, (len(rows), len(rows[0])), ZZ).convert_to(ZZ))
    return [abs(int(f)) for f in factors if f]


@dataclass
class RelativeHomology:
    betti: dict  # degree -> rank
    torsion: dict  # degree -> list of invariant factors > 1
    boundary_entries_ok: bool
    augmentation_ok: bool
    h0_generators: list  # Components of P1 away from P0
    h1_generators: list  # (Component, RatInterval gap)

    def ranks(self) -> tuple[int, int]:
        return self.betti[0], self.betti[1]


def relative_boundary(p1: OneComplex, p0: OneComplex, comp: Component) -> tuple[list, list, list]:
    """Relative boundary matrix of one component: rows vertices, columns edges."""
    verts = sorted(v for v in comp.vertices if v not in p0.vertices)
    edges = [e for e in comp.edges if e not in p0.edges]
    row = {v: i for i, v in enumerate(verts)}
    mat = [[0] * len(edges) for _ in verts]
    for j, e in enumerate(edges):
        lo, hi = p1.edges[e]
        if hi in row:
            mat[row[hi]][j] += 1
        if lo in row:
            mat[row[lo]][j] -= 1
    return verts, edges, mat


def relative_homology(p1: OneComplex, p0: OneComplex) -> RelativeHomology:
    """H0 and H1 of (P1, P0) over the integers.

    The boundary matrix is block diagonal over components of P1, so the
    Smith form is computed per block.
    """
    if not p0.vertices <= p1.vertices or not set(p0.edges) <= set(p1.edges):
        raise ValueError("P0 is not a subcomplex of P1")
    b0 = b1 = 0
    torsion = []
    entries_ok = augmentation_ok = True
    h0, h1 = [], []
    for comp in p1.components():
        verts, edges, mat = relative_boundary(p1, p0, comp)
        factors = smith_normal_form(mat) if mat and edges else []
        rank = len(factors)
        b0 += len(verts) - rank
        b1 += len(edges) - rank
        torsion += [f for f in factors if f > 1]
        entries_ok &= all(x in (-1, 0, 1) for row in mat for x in row)
        # augmentation of an edge boundary (hi - lo) vanishes iff its ends differ
        augmentation_ok &= all(p1.edges[e][0] != p1.edges[e][1] for e in comp.edges)
        h0_here, h1_here = _geometric_generators(p1, p0, comp)
        h0 += h0_here
        h1 += h1_here
    return RelativeHomology(
        {0: b0, 1: b1}, {0: [], 1: torsion}, entries_ok, augmentation_ok, h0, h1
    )


def _geometric_generators(p1: OneComplex, p0: OneComplex, comp: Component):
    """A component away from P0 generates H0; gaps between P0 blocks generate H1."""
    spans = sorted(
        RatInterval(p1.edges[e][0][0], p1.edges[e][1][0]) for e in comp.edges if e in p0.edges
    )
    lone = sorted(p for p, w in comp.vertices if (p, w) in p0.vertices)
    if not spans and not lone:
        return [comp], []
    blocks: list[list[Fraction]] = []
    for iv in sorted(spans + [RatInterval.point(x) for x in lone]):
        if blocks and iv.lo <= blocks[-1][1]:
            blocks[-1][1] = max(blocks[-1][1], iv.hi)
        else:
            blocks.append([iv.lo, iv.hi])
    gaps = [(comp, RatInterval(u[1], v[0])) for u, v in zip(blocks, blocks[1:])]
    return [], gaps


@dataclass
class GradedMatrix:
    matrices: dict  # degree -> list of rows (rows: targets, columns: sources)
    generators: dict  # degree -> list of descriptions

    def dim(self, degree: int) -> int:
        return len(self.generators.get(degree, []))

    def matrix(self, degree: int) -> list:
        return self.matrices.get(degree, [])


def _targets(d: LiftedDigraph, p1: OneComplex, word_prefix, image: RatInterval):
    hits = []
    for vid in p1.edges:
        v = d.vertices[vid]
        if v.word[:-1] != word_prefix:
            continue
        if image.is_point:
            if image.lo in v.feas:
                hits.append(vid)
        elif v.feas.overlaps_properly(image):
            hits.append(vid)
    return hits


def induced_index_map(
    d: LiftedDigraph, p: IndexPairC, complexes, homology: Optional[RelativeHomology] = None
) -> Union[GradedMatrix, RefinementNeeded]:
    """Matrices of the index map on H0 and H1 (columns are source generators)."""
    p1, p0 = complexes
    hom = homology or relative_homology(p1, p0)
    m = d.m
    comps = p1.components()
    comp_of = {}
    for ci, c in enumerate(comps):
        for e in c.edges:
            comp_of[e] = ci
    meets_p0 = {ci for ci, c in enumerate(comps) if any(v in p0.vertices for v in c.vertices)}
    gen0 = {}
    for gi, c in enumerate(hom.h0_generators):
        gen0[comps.index(c)] = gi

    n0 = len(hom.h0_generators)
    mat0 = [[0] * n0 for _ in range(n0)]
    for c in hom.h0_generators:
        src = gen0[comps.index(c)]
        branch = m.pieces[c.word[0]].branch
        image = branch.image(c.extent)
        hits = _targets(d, p1, c.word[1:], image)
        target_comps = {comp_of[h] for h in hits}
        if not target_comps:
            if d.region.contains_interval(image):
                return RefinementNeeded(f"image of component {c.extent} lands on no edge of P1")
            continue
        live = target_comps - meets_p0
        if len(live) > 1 or (live and target_comps & meets_p0):
            return RefinementNeeded(
                f"component {c.extent} word {list(c.word)} maps into several components"
            )
        if live:
            mat0[gen0[live.pop()]][src] = 1

    n1 = len(hom.h1_generators)
    mat1 = [[0] * n1 for _ in range(n1)]
    for src, (c, gap) in enumerate(hom.h1_generators):
        branch = m.pieces[c.word[0]].branch
        image = branch.image(gap)
        sign = 1 if branch.a > 0 else -1
        for tgt, (c2, gap2) in enumerate(hom.h1_generators):
            if c2.word[:-1] != c.word[1:]:
                continue
            if not image.overlaps_properly(gap2):
                continue
            if not image.contains_interval(gap2):
                return RefinementNeeded(
                    f"image of gap {gap} ends strictly inside target gap {gap2}"
                )
            pre = branch.preimage_within(gap, gap2)
            ext = feasibility(m, pre, (c.word[0],) + c2.word)
            if ext == pre:
                mat1[tgt][src] += sign if branch.a != 0 else 0
            elif ext is not None and not ext.is_point:
                return RefinementNeeded(f"gap {gap} only partly carries the word of {gap2}")
    return GradedMatrix(
        {0: mat0, 1: mat1},
        {
            0: [c.describe() for c in hom.h0_generators],
            1: [{**c.describe(), "gap": str(g)} for c, g in hom.h1_generators],
        },
    )


def matmul(a, b):
    if not a or not b:
        rows = len(a)
        cols = len(b[0]) if b else 0
        return [[0] * cols for _ in range(rows)]
    return [[sum(x * y for x, y in zip(row, col)) for col in zip(*b)] for row in a]
