"""Exact periodic-orbit witnesses for the weakened Wazewski property."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

from .numerics import RatInterval, format_rational, interval_meet
from .pcm_model import (
    AdjointSelector,
    PCMap,
    eval_adjoint,
    identity_selector,
    owner,
)
from .pipeline import Analysis, run_pipeline


@dataclass(frozen=True)
class Witness:
    orbit: tuple
    period: int
    selector: AdjointSelector
    symbol_word: tuple
    is_f: bool
    fixed_interval: Optional[RatInterval] = None  # whole interval of fixed points, if any

    def describe(self, m: PCMap) -> dict:
        out = {
            "orbit": [format_rational(x) for x in self.orbit],
            "period": self.period,
            "itinerary": list(self.symbol_word),
            "map": "f" if self.is_f else self.selector.describe(m),
        }
        if self.fixed_interval is not None:
            out["fixed_interval"] = str(self.fixed_interval)
        return out


@dataclass(frozen=True)
class NotFound:
    max_period: int
    words_tried: int
    maps: str

    def describe(self) -> dict:
        return {"found": False, "max_period": self.max_period, "words_tried": self.words_tried, "maps": self.maps}


def _cycles(m: PCMap, N: RatInterval, max_period: int):
    """Yield (word, candidate, fixed interval or None) by period then word.

    Words are pruned as soon as no point of N can follow them (closure
    semantics), so the search never leaves N.
    """
    starts = []
    for piece in m.pieces:
        feas = interval_meet(piece.span, N)
        if feas is not None:
            starts.append(piece)
    allowed = {p.symbol: interval_meet(p.span, N) for p in starts}
    count = 0
    for period in range(1, max_period + 1):
        stack = [((p.symbol,), allowed[p.symbol], p.branch) for p in reversed(starts)]
        while stack:
            word, feas, comp = stack.pop()
            if len(word) == period:
                count += 1
                if word[0] not in allowed:
                    continue
                target = comp.preimage_within(feas, allowed[word[0]])
                if target is None:
                    continue
                if comp.a != 1:
                    x = comp.b / (1 - comp.a)
                    if x in target:
                        yield word, x, None, count
                elif comp.b == 0:
                    yield word, target.midpoint, target, count
                continue
            for s in sorted(allowed, reverse=True):
                nxt = comp.preimage_within(feas, allowed[s])
                if nxt is not None:
                    stack.append((word + (s,), nxt, comp.then(m.pieces[s].branch)))
        yield None, None, None, count


def _orbit(m: PCMap, word, x) -> list[Fraction]:
    out = [x]
    for s in word[:-1]:
        x = m.pieces[s].branch(x)
        out.append(x)
    return out


def _selector_for(m: PCMap, orbit, word) -> Optional[AdjointSelector]:
    """The adjoint that follows ``word`` along ``orbit``, if one exists."""
    table = identity_selector(m).as_dict()
    forced = {}
    for x, s in zip(orbit, word):
        if x in table:
            if forced.get(x, s) != s or x not in m.pieces[s].span:
                return None
            forced[x] = s
        elif x not in m.pieces[s]:
            return None
    table.update(forced)
    return AdjointSelector(table)


def verify_witness(m: PCMap, N: RatInterval, w: Witness) -> bool:
    """Re-run the orbit with plain exact evaluation."""
    g = w.selector
    x = w.orbit[0]
    for t in range(w.period):
        if x != w.orbit[t] or x not in N or owner(m, g, x).symbol != w.symbol_word[t]:
            return False
        x = eval_adjoint(m, g, x)
    return x == w.orbit[0]


def find_invariant_witness(
    m: PCMap,
    N: RatInterval,
    max_period: int,
    selector: Optional[AdjointSelector] = None,
    include_adjoints: bool = True,
) -> Union[Witness, NotFound]:
    """First periodic orbit inside N, searched by period then lexicographic word.

    The map itself is searched exhaustively before any adjoint is tried.
    Passing ``selector`` restricts the search to that one adjoint.
    """
    if max_period < 1:
        raise ValueError("max_period must be at least 1")
    ident = identity_selector(m)
    passes = [selector] if selector is not None else ([ident, None] if include_adjoints else [ident])
    tried = 0
    for g in passes:
        for word, x, interval, count in _cycles(m, N, max_period):
            tried = max(tried, count)
            if word is None:
                continue
            orbit = _orbit(m, word, x)
            chosen = g if g is not None else _selector_for(m, orbit, word)
            if chosen is None:
                continue
            w = Witness(tuple(orbit), len(word), chosen, tuple(word), chosen == ident, interval)
            if verify_witness(m, N, w):
                return w
    maps = "given adjoint" if selector is not None else ("f and adjoints" if include_adjoints else "f")
    return NotFound(max_period, tried, maps)


@dataclass
class WazewskiReport:
    analysis: Analysis
    nontrivial: Optional[bool]
    witness: Optional[object] = None  # Witness or NotFound
    disjunct: Optional[int] = None
    flagged_vertices: list = field(default_factory=list)

    def describe(self) -> dict:
        out = {"index_nontrivial": self.nontrivial}
        if self.witness is None:
            out["witness"] = None
        elif isinstance(self.witness, Witness):
            out["witness"] = {"found": True, **self.witness.describe(self.analysis.m)}
        else:
            out["witness"] = self.witness.describe()
        out["disjunct"] = self.disjunct
        out["breakpoint_vertices_in_cinv"] = len(self.flagged_vertices)
        return out


def check_wazewski(
    m: PCMap,
    N: RatInterval,
    k: int,
    depth: int,
    max_period: int = 8,
    backward_bound: int = 12,
    analysis: Optional[Analysis] = None,
) -> WazewskiReport:
    """Nontrivial index implies an invariant orbit for the map or an adjoint.

    Only ever reports a witness or exhausted bounds, never a counterexample.
    """
    a = analysis or run_pipeline(m, N, k, depth, backward_bound=backward_bound, max_period=max_period)
    flagged = sorted(v for v in a.inv.cinv if a.digraph.vertices[v].degenerate)
    if a.index is None:
        return WazewskiReport(a, None, flagged_vertices=flagged)
    if a.index.trivial:
        return WazewskiReport(a, False, flagged_vertices=flagged)
    w = find_invariant_witness(m, N, max_period)
    disjunct = None
    if isinstance(w, Witness):
        disjunct = 1 if w.is_f else 2
    return WazewskiReport(a, True, w, disjunct, flagged)
