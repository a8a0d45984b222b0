"""Finite outer approximation of the lifted map on the closure of the coding graph.

Vertices are pairs (grid cell, code word) together with the exact set of
points of the cell that can carry the word when every piece is replaced by
its closure.  Closure semantics is what lets a single digraph enclose the
limit points of the coding graph and every adjoint map at once.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .coding import CodeWord, format_word
from .numerics import RatInterval, format_rational, interval_meet
from .pcm_model import IDENTITY_BRANCH, AffineBranch, PCMap, discontinuity_set, eval_map


@dataclass(frozen=True)
class Cell:
    index: int
    span: RatInterval
    symbol: int  # piece owning the cell interior (or the point, for point cells)


@dataclass(frozen=True)
class Grid:
    region: RatInterval
    depth: int
    cuts: tuple
    cells: tuple

    def cells_containing(self, x: Fraction) -> list[Cell]:
        return [c for c in self.cells if x in c.span]


def build_grid(m: PCMap, region: RatInterval, depth: int) -> Grid:
    """Breakpoint-aligned uniform grid over ``region``.

    A region endpoint owned by a piece lying outside the region gets its own
    point cell, so that its true itinerary is represented.
    """
    if depth < 0:
        raise ValueError("grid depth must be nonnegative")
    if not m.space.contains_interval(region):
        raise ValueError(f"region {region} is not inside the space {m.space}")
    base = {region.lo, region.hi, m.space.lo, m.space.hi, *discontinuity_set(m)}
    coarse = sorted(c for c in base if c in region)
    cuts = [coarse[0]]
    parts = 2**depth
    for u, v in zip(coarse, coarse[1:]):
        step = (v - u) / parts
        cuts.extend(u + step * i for i in range(1, parts + 1))
    spans = [RatInterval(u, v) for u, v in zip(cuts, cuts[1:])]
    if not spans:
        spans = [RatInterval.point(region.lo)]
    cells = [(s, m.piece_of(s.midpoint).symbol) for s in spans]
    lo_sym = m.piece_of(region.lo).symbol
    if lo_sym != cells[0][1]:
        cells.insert(0, (RatInterval.point(region.lo), lo_sym))
    hi_sym = m.piece_of(region.hi).symbol
    if hi_sym != cells[-1][1]:
        cells.append((RatInterval.point(region.hi), hi_sym))
    return Grid(
        region,
        depth,
        tuple(cuts),
        tuple(Cell(i, s, sym) for i, (s, sym) in enumerate(cells)),
    )


def compose_word(m: PCMap, word: Sequence[int]) -> AffineBranch:
    comp = IDENTITY_BRANCH
    for s in word:
        comp = comp.then(m.pieces[s].branch)
    return comp


def _bounds(m: PCMap, s: int) -> tuple[Optional[Fraction], Optional[Fraction]]:
    """Closure of piece ``s`` with the outermost pieces extended to the whole line.

    For a self-map this changes nothing, since iterates never leave the
    space.  For a map that is not one (a plain repeller, say) it keeps the
    affine extension of the outer branches instead of cutting orbits off.
    """
    span = m.pieces[s].span
    lo = None if span.lo == m.space.lo else span.lo
    hi = None if span.hi == m.space.hi else span.hi
    return lo, hi


def _pull_back(
    domain: RatInterval, comp: AffineBranch, lo: Optional[Fraction], hi: Optional[Fraction]
) -> Optional[RatInterval]:
    """``{x in domain : lo <= comp(x) <= hi}``, where None means unbounded."""
    left, right = domain.lo, domain.hi
    for bound, is_upper in ((lo, False), (hi, True)):
        if bound is None:
            continue
        if comp.a == 0:
            if (comp.b > bound) if is_upper else (comp.b < bound):
                return None
            continue
        cut = (bound - comp.b) / comp.a
        if is_upper == (comp.a > 0):
            right = min(right, cut)
        else:
            left = max(left, cut)
    return RatInterval(left, right) if left <= right else None


def _admits(m: PCMap, s: int, iv: RatInterval) -> bool:
    lo, hi = _bounds(m, s)
    return (lo is None or iv.hi >= lo) and (hi is None or iv.lo <= hi)


def feasibility(m: PCMap, cell: RatInterval, word: Sequence[int]) -> Optional[RatInterval]:
    """Points of ``cell`` whose closure itinerary can start with ``word``.

    Returns None when no point qualifies.
    """
    if not word:
        raise ValueError("word must have depth at least 1")
    feas = interval_meet(cell, m.pieces[word[0]].span)
    comp = IDENTITY_BRANCH
    for prev, s in zip(word, word[1:]):
        if feas is None:
            return None
        comp = comp.then(m.pieces[prev].branch)
        feas = _pull_back(feas, comp, *_bounds(m, s))
    return feas


@dataclass(frozen=True)
class LiftedCell:
    id: int
    cell: int
    word: CodeWord
    feas: RatInterval

    @property
    def degenerate(self) -> bool:
        return self.feas.is_point


@dataclass
class LiftedDigraph:
    m: PCMap
    grid: Grid
    k: int
    vertices: list = field(default_factory=list)
    succ: list = field(default_factory=list)
    pred: list = field(default_factory=list)
    exits: frozenset = frozenset()
    _by_word: dict = field(default_factory=dict, repr=False)

    @property
    def region(self) -> RatInterval:
        return self.grid.region

    def __len__(self) -> int:
        return len(self.vertices)

    def project(self, vid: int) -> RatInterval:
        return project(self, self.vertices[vid])

    def branch(self, vid: int) -> AffineBranch:
        return self.m.pieces[self.vertices[vid].word[0]].branch

    def image(self, vid: int) -> RatInterval:
        v = self.vertices[vid]
        return self.branch(vid).image(v.feas)

    def edges(self) -> Iterable[tuple[int, int]]:
        for u, outs in enumerate(self.succ):
            for v in outs:
                yield u, v

    def locate(self, x: Fraction, word: Sequence[int]) -> list[int]:
        """Vertices whose word is ``word`` and whose feasibility set holds ``x``."""
        word = tuple(word)
        return [v.id for v in self._by_word.get(word, ()) if x in v.feas]

    def touching(self, vid: int) -> list[int]:
        """Vertices sharing a point and the whole word with ``vid``."""
        v = self.vertices[vid]
        return [
            u.id
            for u in self._by_word.get(v.word, ())
            if u.id != vid and interval_meet(u.feas, v.feas) is not None
        ]

    def touches_region_boundary(self, vid: int) -> bool:
        """Feasibility set meets an endpoint of the region lying inside the space."""
        v = self.vertices[vid]
        ends = [e for e in (self.region.lo, self.region.hi) if e not in (self.m.space.lo, self.m.space.hi)]
        return any(e in v.feas for e in ends)

    def breakpoint_vertices(self) -> list[int]:
        return [v.id for v in self.vertices if v.degenerate]

    def commutation_defects(self) -> list[int]:
        """Vertices at which the closure extension disagrees with the base map.

        A feasibility endpoint that the piece ``w0`` does not own is mapped by
        ``w0``'s branch in the lift but by another branch in the base map.
        """
        out = []
        for v in self.vertices:
            piece = self.m.pieces[v.word[0]]
            for e in {v.feas.lo, v.feas.hi}:
                if e not in piece and piece.branch(e) != eval_map(self.m, e):
                    out.append(v.id)
                    break
        return out

    def to_dot(self) -> str:
        sep = "" if self.m.n <= 10 else ","
        lines = ["digraph lifted {"]
        for v in self.vertices:
            c = self.grid.cells[v.cell]
            word = sep.join(str(s) for s in v.word)
            lines.append(f'  v{v.id} [label="{v.cell}:{c.span}|{word}"];')
        for u, w in self.edges():
            lines.append(f"  v{u} -> v{w};")
        lines.append("}")
        return "\n".join(lines) + "\n"

    def to_csv(self, marks: Optional[dict] = None) -> str:
        """One row per vertex; ``marks`` maps column name to a vertex-id set."""
        marks = marks or {}
        head = ["id", "cell", "cell_lo", "cell_hi", "word", "feas_lo", "feas_hi", "exit", *marks]
        rows = [",".join(head)]
        for v in self.vertices:
            c = self.grid.cells[v.cell].span
            row = [
                str(v.id),
                str(v.cell),
                format_rational(c.lo),
                format_rational(c.hi),
                format_word(v.word).replace(",", " "),
                format_rational(v.feas.lo),
                format_rational(v.feas.hi),
                str(int(v.id in self.exits)),
            ]
            row += [str(int(v.id in ids)) for ids in marks.values()]
            rows.append(",".join(row))
        return "\n".join(rows) + "\n"


def project(d: LiftedDigraph, v: LiftedCell) -> RatInterval:
    return d.grid.cells[v.cell].span


def _words_for_cell(m: PCMap, cell: Cell, k: int):
    """Depth-first enumeration of admissible words with their feasibility sets."""
    start = interval_meet(cell.span, m.pieces[cell.symbol].span)
    if start is None:
        return
    stack = [((cell.symbol,), start, m.pieces[cell.symbol].branch)]
    while stack:
        word, feas, comp = stack.pop()
        if len(word) == k:
            yield word, feas
            continue
        img = comp.image(feas)
        for piece in reversed(m.pieces):
            if not _admits(m, piece.symbol, img):
                continue
            nxt = _pull_back(feas, comp, *_bounds(m, piece.symbol))
            if nxt is not None:
                stack.append((word + (piece.symbol,), nxt, comp.then(piece.branch)))


def build_lifted(m: PCMap, region: RatInterval, k: int, depth: int) -> LiftedDigraph:
    if k < 1:
        raise ValueError("code depth must be at least 1")
    grid = build_grid(m, region, depth)
    vertices: list[LiftedCell] = []
    for cell in grid.cells:
        for word, feas in sorted(_words_for_cell(m, cell, k)):
            vertices.append(LiftedCell(len(vertices), cell.index, word, feas))
    by_prefix = defaultdict(list)
    by_word = defaultdict(list)
    for v in vertices:
        by_prefix[v.word[:-1]].append(v)
        by_word[v.word].append(v)
    succ: list[list[int]] = [[] for _ in vertices]
    pred: list[list[int]] = [[] for _ in vertices]
    exits = set()
    for v in vertices:
        img = m.pieces[v.word[0]].branch.image(v.feas)
        if not region.contains_interval(img):
            exits.add(v.id)
        for u in by_prefix.get(v.word[1:], ()):
            if interval_meet(img, u.feas) is not None:
                succ[v.id].append(u.id)
                pred[u.id].append(v.id)
    return LiftedDigraph(m, grid, k, vertices, succ, pred, frozenset(exits), dict(by_word))


def lifted_path(d: LiftedDigraph, orbit: Sequence[Fraction], words: Sequence[CodeWord]) -> bool:
    """Whether a point orbit with the given words is traced by some digraph path."""
    current = set(d.locate(orbit[0], words[0]))
    if not current:
        return False
    for x, w in zip(orbit[1:], words[1:]):
        here = set(d.locate(x, w))
        current = {v for u in current for v in d.succ[u] if v in here}
        if not current:
            return False
    return True
