"""The full chain at one fixed resolution: lift, isolate, index pair, homology, class."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .homology import RelativeHomology, induced_index_map, realize, relative_homology
from .index_pair import RefinementNeeded, build_index_pair
from .invariance import InvResult, Status, Verdict, combinatorial_inv, is_compatible, is_isolating
from .lifted import LiftedDigraph, build_lifted
from .numerics import RatInterval
from .pcm_model import PCMap
from .szymczak import ConleyIndexClass, index_class


@dataclass
class Analysis:
    m: PCMap
    N: RatInterval
    k: int
    depth: int
    digraph: LiftedDigraph
    inv: InvResult
    isolation: Verdict
    compatibility: Optional[Verdict] = None
    pair: Optional[object] = None  # IndexPairC or RefinementNeeded
    complexes: Optional[tuple] = None
    homology: Optional[RelativeHomology] = None
    graded: Optional[object] = None  # GradedMatrix or RefinementNeeded
    index: Optional[ConleyIndexClass] = None
    notes: list = field(default_factory=list)

    @property
    def outcome(self) -> str:
        """``ok``, ``violated``, ``unknown`` or ``refine``."""
        for verdict in (self.isolation, self.compatibility):
            if verdict is None:
                continue
            if verdict.status is Status.VIOLATED:
                return "violated"
            if verdict.status is Status.UNKNOWN:
                return "unknown"
        if isinstance(self.pair, RefinementNeeded) or isinstance(self.graded, RefinementNeeded):
            return "refine"
        return "ok" if self.index is not None else "unknown"

    @property
    def component_count(self) -> Optional[int]:
        if self.complexes is None:
            return None
        return len(self.complexes[0].components())


def run_pipeline(
    m: PCMap,
    N: RatInterval,
    k: int,
    depth: int,
    *,
    backward_bound: int = 12,
    max_period: int = 8,
    strict: bool = False,
) -> Analysis:
    d = build_lifted(m, N, k, depth)
    inv = combinatorial_inv(d)
    iso = is_isolating(m, N, k, depth, strict=strict, max_period=max_period, digraph=d, inv=inv)
    a = Analysis(m, N, k, depth, d, inv, iso)
    if iso.status is not Status.CERTIFIED:
        return a
    a.compatibility = is_compatible(m, N, k, depth, backward_bound, digraph=d, inv=inv)
    if a.compatibility.status is not Status.CERTIFIED:
        return a
    a.pair = build_index_pair(d, inv)
    if isinstance(a.pair, RefinementNeeded):
        return a
    a.complexes = realize(d, a.pair)
    a.homology = relative_homology(*a.complexes)
    a.graded = induced_index_map(d, a.pair, a.complexes, a.homology)
    if isinstance(a.graded, RefinementNeeded):
        return a
    a.index = index_class(a.graded)
    return a
