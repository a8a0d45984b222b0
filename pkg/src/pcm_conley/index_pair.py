"""Combinatorial index pairs in the lifted digraph."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

from .invariance import InvResult
from .lifted import LiftedDigraph


@dataclass(frozen=True)
class IndexPairC:
    p1: frozenset
    p0: frozenset
    cinv: frozenset


@dataclass(frozen=True)
class ConditionViolation:
    condition: int
    vertex: int
    message: str

    def __str__(self) -> str:
        return f"condition ({self.condition}) fails at vertex {self.vertex}: {self.message}"


@dataclass
class RefinementNeeded:
    reason: str
    violations: list = field(default_factory=list)


def forward_closure(d: LiftedDigraph, seeds: Iterable[int], within: Optional[set] = None) -> set:
    seen = set(seeds)
    stack = list(seen)
    while stack:
        v = stack.pop()
        for w in d.succ[v]:
            if w not in seen and (within is None or w in within):
                seen.add(w)
                stack.append(w)
    return seen


def _leaves(d: LiftedDigraph, v: int, inside: set) -> bool:
    """``v`` can be carried out of ``inside`` (out of the region counts)."""
    return v in d.exits or any(w not in inside for w in d.succ[v])


def build_index_pair(
    d: LiftedDigraph, inv: InvResult, within: Optional[Iterable[int]] = None
) -> Union[IndexPairC, RefinementNeeded]:
    """Forward closure of the invariant set, with its forward-closed exit set."""
    within = None if within is None else set(within)
    p1 = forward_closure(d, inv.cinv, within)
    exit_set = {v for v in p1 if _leaves(d, v, p1)}
    p0 = forward_closure(d, exit_set, p1)
    pair = IndexPairC(frozenset(p1), frozenset(p0), inv.cinv)
    violations = verify_index_pair(d, pair)
    if violations:
        return RefinementNeeded("index pair conditions not met at this resolution", violations)
    return pair


def verify_index_pair(d: LiftedDigraph, p: IndexPairC) -> list[ConditionViolation]:
    """Check the three index pair conditions literally; empty list means valid.

    Condition (1) is read combinatorially: the invariant set sits in P1 - P0
    and none of its vertices touches P0 or the boundary of the region.
    """
    out = []
    for v in sorted(p.p0 - p.p1):
        out.append(ConditionViolation(0, v, "p0 is not contained in p1"))
    core = p.p1 - p.p0
    for v in sorted(p.cinv):
        if v not in core:
            out.append(ConditionViolation(1, v, "invariant vertex outside p1 - p0"))
        elif d.touches_region_boundary(v):
            out.append(ConditionViolation(1, v, "invariant vertex touches the region boundary"))
        else:
            hit = [u for u in d.touching(v) if u in p.p0]
            if hit:
                out.append(ConditionViolation(1, v, f"invariant vertex touches p0 vertex {hit[0]}"))
    for v in sorted(p.p0 & p.p1):
        bad = [w for w in d.succ[v] if w in core]
        if bad:
            out.append(ConditionViolation(2, v, f"p0 vertex maps into p1 - p0 (vertex {bad[0]})"))
    for v in sorted(core):
        if _leaves(d, v, p.p1):
            out.append(ConditionViolation(3, v, "vertex leaves p1 but is not in p0"))
    return out
