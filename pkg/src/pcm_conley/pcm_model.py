"""Piecewise continuous maps on a compact rational interval.

A map is an ordered list of interval pieces, each carrying an affine branch
``x -> a*x + b``.  Endpoint membership is explicit (``lo_closed`` /
``hi_closed``) so that the half-open pieces used in practice are represented
exactly.  The restriction of the map to the closure of a piece is its branch.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Iterator, Optional

from .numerics import (
    RatInterval,
    RationalLike,
    affine_image,
    affine_preimage_within,
    as_rational,
    format_rational,
    interval_meet,
)


class DomainError(ValueError):
    """A point outside the space was handed to the map."""


@dataclass(frozen=True)
class AffineBranch:
    a: Fraction
    b: Fraction

    def __post_init__(self):
        object.__setattr__(self, "a", as_rational(self.a))
        object.__setattr__(self, "b", as_rational(self.b))

    def __call__(self, x: RationalLike) -> Fraction:
        return self.a * as_rational(x) + self.b

    def image(self, iv: RatInterval) -> RatInterval:
        return affine_image(iv, self.a, self.b)

    def preimage_within(self, domain: RatInterval, iv: RatInterval) -> Optional[RatInterval]:
        return affine_preimage_within(domain, iv, self.a, self.b)

    def then(self, other: "AffineBranch") -> "AffineBranch":
        """Branch of ``other(self(x))``."""
        return AffineBranch(other.a * self.a, other.a * self.b + other.b)

    def __str__(self) -> str:
        a, b = self.a, self.b
        if a == 0:
            return format_rational(b)
        lead = "x" if a == 1 else "-x" if a == -1 else f"{format_rational(a)}*x"
        if b == 0:
            return lead
        return f"{lead} {'+' if b > 0 else '-'} {format_rational(abs(b))}"


IDENTITY_BRANCH = AffineBranch(1, 0)


@dataclass(frozen=True)
class Piece:
    span: RatInterval
    lo_closed: bool
    hi_closed: bool
    branch: AffineBranch
    symbol: int = 0

    def __contains__(self, x) -> bool:
        x = as_rational(x)
        if x < self.span.lo or x > self.span.hi:
            return False
        if x == self.span.lo and not self.lo_closed:
            return False
        if x == self.span.hi and not self.hi_closed:
            return False
        return True

    @property
    def closure(self) -> RatInterval:
        return self.span

    @property
    def is_empty(self) -> bool:
        return self.span.is_point and not (self.lo_closed and self.hi_closed)

    def __str__(self) -> str:
        left = "[" if self.lo_closed else "("
        right = "]" if self.hi_closed else ")"
        return (
            f"{left}{format_rational(self.span.lo)},{format_rational(self.span.hi)}{right}"
            f" -> {self.branch}"
        )


def make_piece(lo, hi, a, b, lo_closed=True, hi_closed=False, symbol=0) -> Piece:
    return Piece(RatInterval(lo, hi), lo_closed, hi_closed, AffineBranch(a, b), symbol)


@dataclass(frozen=True)
class Violation:
    axiom: str
    message: str
    pieces: tuple = ()

    def __str__(self) -> str:
        return f"{self.axiom}: {self.message}"


@dataclass(frozen=True)
class PCMap:
    space: RatInterval
    pieces: tuple
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "pieces", tuple(self.pieces))

    @classmethod
    def from_pieces(cls, space: RatInterval, pieces: Iterable[Piece], name: str = "") -> "PCMap":
        """Sort pieces by position and renumber their symbols 0..n-1."""
        ordered = sorted(pieces, key=lambda p: (p.span.lo, p.span.hi, not p.lo_closed))
        return cls(space, tuple(replace(p, symbol=i) for i, p in enumerate(ordered)), name)

    @property
    def n(self) -> int:
        return len(self.pieces)

    def piece_of(self, x: RationalLike) -> Piece:
        x = as_rational(x)
        if x not in self.space:
            raise DomainError(f"{format_rational(x)} is outside the space {self.space}")
        for piece in self.pieces:
            if x in piece:
                return piece
        raise DomainError(f"no piece contains {format_rational(x)}")

    def symbols_at(self, x: RationalLike) -> list[int]:
        """Symbols of every piece whose closure contains ``x``."""
        x = as_rational(x)
        return [p.symbol for p in self.pieces if x in p.span]

    def __str__(self) -> str:
        lines = [f"PCMap on {self.space}" + (f" ({self.name})" if self.name else "")]
        lines += [f"  {p.symbol}: {p}" for p in self.pieces]
        return "\n".join(lines)


def validate(m: PCMap) -> list[Violation]:
    """Check the partition axioms and the self-map property.

    An empty list means the map is valid.
    """
    out: list[Violation] = []
    pieces = m.pieces
    if not pieces:
        return [Violation("partition", "no pieces")]
    for i, p in enumerate(pieces):
        if p.symbol != i:
            out.append(Violation("symbols", f"piece at position {i} carries symbol {p.symbol}", (i,)))
        if p.is_empty:
            out.append(Violation("nonempty", f"piece {i} {p} contains no point", (i,)))
        if not m.space.contains_interval(p.span):
            out.append(Violation("partition", f"piece {i} {p} sticks out of the space {m.space}", (i,)))
    for i, j in itertools.combinations(range(len(pieces)), 2):
        p, q = pieces[i], pieces[j]
        common = interval_meet(p.span, q.span)
        if common is None:
            continue
        if not common.is_point:
            out.append(Violation("disjoint", f"pieces {i} and {j} overlap on {common}", (i, j)))
        elif common.lo in p and common.lo in q:
            out.append(
                Violation("disjoint", f"overlap at {format_rational(common.lo)}", (i, j))
            )
    out.extend(_coverage_gaps(m))
    for p in pieces:
        img = p.branch.image(p.span)
        if not m.space.contains_interval(img):
            out.append(
                Violation("self-map", f"not a self-map: piece {p.symbol} has image {img}", (p.symbol,))
            )
    return out


def _coverage_gaps(m: PCMap) -> list[Violation]:
    # candidate uncovered points: every endpoint plus one point inside every gap
    cuts = sorted({m.space.lo, m.space.hi} | {e for p in m.pieces for e in (p.span.lo, p.span.hi)})
    cuts = [c for c in cuts if c in m.space]
    probes = list(cuts) + [(u + v) / 2 for u, v in zip(cuts, cuts[1:])]
    out = []
    for x in sorted(probes):
        if not any(x in p for p in m.pieces):
            out.append(Violation("cover", f"gap at {format_rational(x)}"))
    return out


def eval_map(m: PCMap, x: RationalLike) -> Fraction:
    return m.piece_of(x).branch(x)


def discontinuity_set(m: PCMap) -> list[Fraction]:
    """Points lying in the closures of two distinct pieces."""
    pts = set()
    for p, q in itertools.combinations(m.pieces, 2):
        common = interval_meet(p.span, q.span)
        if common is not None:
            if not common.is_point:
                raise ValueError("pieces overlap; validate the map first")
            pts.add(common.lo)
    return sorted(pts)


@dataclass(frozen=True)
class AdjointSelector:
    """Ownership of each discontinuity point by one adjacent piece."""

    assignment: tuple = field(default=())  # sorted ((point, symbol), ...)

    def __post_init__(self):
        items = self.assignment.items() if isinstance(self.assignment, dict) else self.assignment
        object.__setattr__(
            self, "assignment", tuple(sorted((as_rational(d), int(s)) for d, s in items))
        )

    def as_dict(self) -> dict:
        return dict(self.assignment)

    def symbol_at(self, d: Fraction) -> Optional[int]:
        return self.as_dict().get(d)

    def describe(self, m: Optional[PCMap] = None) -> str:
        if m is not None and self == identity_selector(m):
            return "f"
        return "{" + ", ".join(f"{format_rational(d)}->{s}" for d, s in self.assignment) + "}"


def identity_selector(m: PCMap) -> AdjointSelector:
    return AdjointSelector(tuple((d, m.piece_of(d).symbol) for d in discontinuity_set(m)))


def is_identity(m: PCMap, g: Optional[AdjointSelector]) -> bool:
    return g is None or g == identity_selector(m)


def check_selector(m: PCMap, g: AdjointSelector) -> None:
    dset = set(discontinuity_set(m))
    table = g.as_dict()
    if set(table) != dset:
        raise ValueError("selector must assign every discontinuity point exactly once")
    for d, s in table.items():
        if not 0 <= s < m.n or d not in m.pieces[s].span:
            raise ValueError(f"piece {s} does not have {format_rational(d)} in its closure")


def owner(m: PCMap, g: Optional[AdjointSelector], x: RationalLike) -> Piece:
    """The piece whose branch the adjoint ``g`` applies at ``x``."""
    x = as_rational(x)
    if g is not None:
        s = g.symbol_at(x)
        if s is not None:
            return m.pieces[s]
    return m.piece_of(x)


def eval_adjoint(m: PCMap, g: Optional[AdjointSelector], x: RationalLike) -> Fraction:
    x = as_rational(x)
    return owner(m, g, x).branch(x)


def list_adjoints(m: PCMap) -> list[AdjointSelector]:
    dset = discontinuity_set(m)
    choices = [m.symbols_at(d) for d in dset]
    return [AdjointSelector(tuple(zip(dset, combo))) for combo in itertools.product(*choices)]


def minimal_partition(m: PCMap) -> PCMap:
    """Coarsen by merging neighbours that share one affine branch.

    A degenerate (single point) piece is also absorbed into a neighbour whose
    branch takes the same value there, since a branch only matters on its
    own points.  Neighbours that join continuously with different slopes are
    kept apart: their union is not a single affine branch.
    """
    pieces = list(m.pieces)
    changed = True
    while changed:
        changed = False
        for i in range(len(pieces) - 1):
            merged = _try_merge(pieces[i], pieces[i + 1])
            if merged is not None:
                pieces[i : i + 2] = [merged]
                changed = True
                break
    return PCMap.from_pieces(m.space, pieces, m.name)


def _try_merge(p: Piece, q: Piece) -> Optional[Piece]:
    if p.span.hi != q.span.lo:
        return None
    span = RatInterval(p.span.lo, q.span.hi)
    if p.branch == q.branch:
        return Piece(span, p.lo_closed, q.hi_closed, p.branch)
    if p.span.is_point and p.branch(p.span.lo) == q.branch(p.span.lo):
        return Piece(span, True, q.hi_closed, q.branch)
    if q.span.is_point and q.branch(q.span.lo) == p.branch(q.span.lo):
        return Piece(span, p.lo_closed, True, p.branch)
    return None


def continuous_breakpoints(m: PCMap) -> list[Fraction]:
    """Breakpoints where adjacent branches agree but cannot be merged affinely."""
    out = []
    for p, q in zip(m.pieces, m.pieces[1:]):
        d = p.span.hi
        if p.branch != q.branch and p.branch(d) == q.branch(d):
            out.append(d)
    return out


def iterate_orbit(
    m: PCMap, x: RationalLike, steps: int, g: Optional[AdjointSelector] = None
) -> Iterator[Fraction]:
    """Yield ``x, g(x), g(g(x)), ...`` (``steps + 1`` points)."""
    x = as_rational(x)
    yield x
    for _ in range(steps):
        x = eval_adjoint(m, g, x)
        yield x


def branch_values_at_breakpoints(m: PCMap) -> list[tuple[Fraction, Fraction, Fraction]]:
    """(d, left branch value, right branch value) for adjacent pieces."""
    return [(p.span.hi, p.branch(p.span.hi), q.branch(p.span.hi)) for p, q in zip(m.pieces, m.pieces[1:])]


def pieces_meeting(m: PCMap, region: RatInterval) -> list[Piece]:
    return [p for p in m.pieces if interval_meet(p.span, region) is not None]


def single_piece_map(space: RatInterval, a, b, name: str = "") -> PCMap:
    return PCMap.from_pieces(space, [Piece(space, True, True, AffineBranch(a, b))], name)
