"""Combinatorial invariant sets and isolation / compatibility certificates."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Optional

from .lifted import LiftedDigraph, build_lifted
from .numerics import RatInterval, format_rational
from .pcm_model import (
    AdjointSelector,
    PCMap,
    discontinuity_set,
    identity_selector,
    list_adjoints,
    owner,
)


class Status(str, Enum):
    CERTIFIED = "Certified"
    VIOLATED = "Violated"
    UNKNOWN = "Unknown"


@dataclass
class Verdict:
    status: Status
    evidence: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status is Status.CERTIFIED


@dataclass(frozen=True)
class InvResult:
    cinv: frozenset
    cinv_minus: frozenset
    cinv_plus: frozenset
    rounds: int


def prune(
    d: LiftedDigraph,
    alive: Iterable[int],
    forward: bool = True,
    backward: bool = True,
    rng: Optional[random.Random] = None,
) -> tuple[set, int]:
    """Delete vertices lacking a successor (``forward``) or predecessor
    (``backward``) inside the surviving set until nothing changes.

    With ``rng`` the dead vertices are removed one at a time in random order;
    otherwise whole rounds are removed at once and the round count returned.
    """
    alive = set(alive)

    def dead(v):
        if forward and not any(w in alive for w in d.succ[v]):
            return True
        return backward and not any(u in alive for u in d.pred[v])

    rounds = 0
    if rng is None:
        while True:
            doomed = [v for v in alive if dead(v)]
            if not doomed:
                return alive, rounds
            rounds += 1
            alive.difference_update(doomed)
    while True:
        doomed = sorted(v for v in alive if dead(v))
        if not doomed:
            return alive, rounds
        rounds += 1
        alive.discard(rng.choice(doomed))


def combinatorial_inv(d: LiftedDigraph, within: Optional[Iterable[int]] = None) -> InvResult:
    base = range(len(d)) if within is None else within
    base = set(base)
    cinv, rounds = prune(d, base)
    plus, _ = prune(d, base, backward=False)
    minus, _ = prune(d, base, forward=False)
    return InvResult(frozenset(cinv), frozenset(minus), frozenset(plus), rounds)


def relevant_endpoints(m: PCMap, N: RatInterval) -> list[Fraction]:
    """Endpoints of N that lie in the interior of the space."""
    return sorted({e for e in (N.lo, N.hi) if e not in (m.space.lo, m.space.hi)})


def periodic_in(m: PCMap, x: Fraction, N: RatInterval, max_period: int, g=None) -> Optional[list]:
    """The orbit of ``x`` if it returns to ``x`` within ``max_period`` steps inside N."""
    orbit = [x]
    y = x
    for _ in range(max_period):
        if y not in N:
            return None
        y = owner(m, g, y).branch(y)
        if y == x:
            return orbit
        orbit.append(y)
    return None


def is_isolating(
    m: PCMap,
    N: RatInterval,
    k: int,
    depth: int,
    *,
    strict: bool = False,
    max_period: int = 8,
    digraph: Optional[LiftedDigraph] = None,
    inv: Optional[InvResult] = None,
) -> Verdict:
    d = digraph or build_lifted(m, N, k, depth)
    inv = inv or combinatorial_inv(d)
    ends = relevant_endpoints(m, N)
    zone = {c.index for c in d.grid.cells if any(e in c.span for e in ends)}
    if strict:
        zone |= {
            c.index
            for c in d.grid.cells
            for z in list(zone)
            if _adjacent(c.span, d.grid.cells[z].span)
        }
    touching = sorted(v for v in inv.cinv if d.vertices[v].cell in zone)
    evidence = {
        "relevant_endpoints": [format_rational(e) for e in ends],
        "cinv_size": len(inv.cinv),
        "code_depth": k,
        "grid_depth": depth,
        "strict": strict,
    }
    if not touching:
        return Verdict(Status.CERTIFIED, evidence)
    # the lift carries the orbits of every adjoint, so any of them disproves isolation
    for e in ends:
        for g in list_adjoints(m):
            orbit = periodic_in(m, e, N, max_period, g)
            if orbit is not None:
                evidence["invariant_orbit"] = [format_rational(x) for x in orbit]
                evidence["map"] = g.describe(m)
                return Verdict(Status.VIOLATED, evidence)
    evidence["touching_vertices"] = [_describe(d, v) for v in touching[:20]]
    evidence["hint"] = "increase grid_depth and/or code_depth"
    evidence["max_period"] = max_period
    return Verdict(Status.UNKNOWN, evidence)


def _adjacent(u: RatInterval, v: RatInterval) -> bool:
    return u.lo <= v.hi and v.lo <= u.hi


def _describe(d: LiftedDigraph, vid: int) -> dict:
    v = d.vertices[vid]
    return {
        "id": vid,
        "cell": str(d.grid.cells[v.cell].span),
        "word": list(v.word),
        "feas": str(v.feas),
    }


@dataclass
class BackwardResult:
    outcome: str  # "finite", "cycle", "unknown"
    chain: list = field(default_factory=list)
    nodes: int = 0
    reason: str = ""


def preimages(m: PCMap, g: Optional[AdjointSelector], y: Fraction, N: RatInterval) -> Optional[list]:
    """Exact preimages of ``y`` in N under the adjoint ``g``.

    None signals a constant branch hitting ``y``: a whole interval of
    preimages, which the exact search does not enumerate.
    """
    out = []
    for piece in m.pieces:
        br = piece.branch
        if br.a == 0:
            if br.b == y and any(x in N for x in (piece.span.lo, piece.span.hi, piece.span.midpoint)):
                return None
            continue
        x = (y - br.b) / br.a
        if x in N and x in piece.span and owner(m, g, x) is piece:
            out.append(x)
    return out


def backward_search(
    m: PCMap,
    g: Optional[AdjointSelector],
    N: RatInterval,
    b: Fraction,
    bound: int,
    node_budget: int = 200_000,
) -> BackwardResult:
    """Decide whether ``b`` has a backward orbit inside N under ``g``.

    A repeated point along a backward chain yields a periodic backward orbit.
    A finite backward tree proves there is none.
    """
    done = set()  # points whose backward tree is known to be finite
    nodes = 0
    truncated = False

    def visit(y, path, on_path):
        nonlocal nodes, truncated
        nodes += 1
        if nodes > node_budget:
            raise _Budget
        pre = preimages(m, g, y, N)
        if pre is None:
            raise _Unbounded
        for x in pre:
            if x in on_path:
                return path + [x]
            if x in done:
                continue
            if len(path) > bound:
                truncated = True
                continue
            on_path.add(x)
            hit = visit(x, path + [x], on_path)
            on_path.discard(x)
            if hit:
                return hit
        if not truncated:
            done.add(y)
        return None

    try:
        chain = visit(b, [b], {b})
    except _Budget:
        return BackwardResult("unknown", nodes=nodes, reason="node budget exhausted")
    except _Unbounded:
        return BackwardResult("unknown", nodes=nodes, reason="constant branch: interval of preimages")
    if chain:
        return BackwardResult("cycle", chain, nodes)
    if truncated:
        return BackwardResult("unknown", nodes=nodes, reason=f"backward bound {bound} exhausted")
    return BackwardResult("finite", nodes=nodes)


class _Budget(Exception):
    pass


class _Unbounded(Exception):
    pass


def is_compatible(
    m: PCMap,
    N: RatInterval,
    k: int,
    depth: int,
    backward_bound: int = 12,
    *,
    digraph: Optional[LiftedDigraph] = None,
    inv: Optional[InvResult] = None,
    force_exact: bool = False,
) -> Verdict:
    """Boundary points of N in the discontinuity set must carry no backward
    orbit inside N, for the map and for every adjoint.

    ``force_exact`` skips the combinatorial exclusion (used to cross-check it).
    """
    dset = set(discontinuity_set(m))
    B = [e for e in relevant_endpoints(m, N) if e in dset]
    evidence = {
        "boundary": "relative to the space",
        "boundary_discontinuities": [format_rational(b) for b in B],
        "backward_bound": backward_bound,
        "endpoints": {},
    }
    if not B:
        return Verdict(Status.CERTIFIED, evidence)
    d = digraph or build_lifted(m, N, k, depth)
    inv = inv or combinatorial_inv(d)
    ident = identity_selector(m)
    worst = Status.CERTIFIED
    for b in B:
        key = format_rational(b)
        blockers = [v for v in inv.cinv_minus if b in d.vertices[v].feas]
        if not blockers and not force_exact:
            evidence["endpoints"][key] = {"status": Status.CERTIFIED.value, "method": "exclusion"}
            continue
        per = {}
        status = Status.CERTIFIED
        for g in list_adjoints(m):
            res = backward_search(m, g, N, b, backward_bound)
            label = "f" if g == ident else g.describe()
            entry = {"outcome": res.outcome, "nodes": res.nodes}
            if res.outcome == "cycle":
                entry["chain"] = [format_rational(x) for x in res.chain]
                status = Status.VIOLATED
            elif res.outcome == "unknown":
                entry["reason"] = res.reason
                if status is not Status.VIOLATED:
                    status = Status.UNKNOWN
            per[label] = entry
        evidence["endpoints"][key] = {
            "status": status.value,
            "method": "exact backward search",
            "adjoints": per,
        }
        if status is Status.VIOLATED or (status is Status.UNKNOWN and worst is Status.CERTIFIED):
            worst = status
    return Verdict(worst, evidence)

