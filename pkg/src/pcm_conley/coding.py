"""Truncated itineraries and the metrics on the symbol and graph spaces."""

from __future__ import annotations

from fractions import Fraction
from typing import Optional, Sequence

from .numerics import RationalLike, as_rational
from .pcm_model import AdjointSelector, DomainError, PCMap, owner

CodeWord = tuple  # tuple[int, ...], length = depth


def code(m: PCMap, g: Optional[AdjointSelector], x: RationalLike, k: int) -> CodeWord:
    """First ``k`` symbols of the itinerary of ``x`` under the adjoint ``g``.

    ``g=None`` (or the identity selector) codes the map itself.
    """
    if k < 1:
        raise ValueError("code depth must be at least 1")
    x = as_rational(x)
    out = []
    for _ in range(k):
        if x not in m.space:
            raise DomainError(f"orbit left the space at {x}")
        piece = owner(m, g, x)
        out.append(piece.symbol)
        x = piece.branch(x)
    return tuple(out)


def shift(word: Sequence[int]) -> CodeWord:
    return tuple(word[1:])


def sigma_metric(u: Sequence[int], v: Sequence[int]) -> Fraction:
    """``1/(i+1)`` for the first index ``i`` where the words differ, 0 if equal."""
    if len(u) != len(v):
        raise ValueError(f"depth mismatch: {len(u)} vs {len(v)}")
    for i, (s, t) in enumerate(zip(u, v)):
        if s != t:
            return Fraction(1, i + 1)
    return Fraction(0)


def graph_metric(p, q) -> Fraction:
    """Max of the base distance and the symbol distance of two lifted points."""
    (x1, w1), (x2, w2) = p, q
    return max(abs(as_rational(x1) - as_rational(x2)), sigma_metric(w1, w2))


def format_word(word: Sequence[int]) -> str:
    return ",".join(str(s) for s in word)
