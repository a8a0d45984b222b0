"""Conley index of piecewise continuous interval maps, computed exactly.

The map is lifted to the closure of the graph of its coding map, where it
becomes continuous; a finite digraph over that lift certifies isolation and
yields an index pair whose relative homology carries the index map.
"""

from .numerics import RatInterval, as_rational, format_rational
from .pcm_model import (
    AdjointSelector,
    PCMap,
    eval_adjoint,
    eval_map,
    list_adjoints,
    make_piece,
    minimal_partition,
    validate,
)
from .coding import code, graph_metric, sigma_metric
from .lifted import build_lifted
from .invariance import Status, combinatorial_inv, is_compatible, is_isolating
from .index_pair import RefinementNeeded, build_index_pair
from .homology import induced_index_map, realize, relative_homology
from .szymczak import SzMorphism, compare_classes, index_class, leray_reduce, szymczak_equal
from .pipeline import run_pipeline
from .wazewski import check_wazewski, find_invariant_witness

__version__ = "0.1.0"

__all__ = [
    "AdjointSelector",
    "PCMap",
    "RatInterval",
    "RefinementNeeded",
    "Status",
    "SzMorphism",
    "as_rational",
    "build_index_pair",
    "build_lifted",
    "check_wazewski",
    "code",
    "combinatorial_inv",
    "compare_classes",
    "eval_adjoint",
    "eval_map",
    "find_invariant_witness",
    "format_rational",
    "graph_metric",
    "index_class",
    "induced_index_map",
    "is_compatible",
    "is_isolating",
    "leray_reduce",
    "list_adjoints",
    "make_piece",
    "minimal_partition",
    "realize",
    "relative_homology",
    "run_pipeline",
    "sigma_metric",
    "szymczak_equal",
    "validate",
]
