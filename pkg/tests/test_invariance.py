import random
from fractions import Fraction as Q

import pytest

from pcm_conley.fixtures import (
    ADJOINT_WITNESS_N,
    FIXTURES,
    JUMP_N,
    SEVEN_BRANCH_N,
    adjoint_witness_map,
    identity_map,
    jump_map,
    seven_branch_map,
)
from pcm_conley.invariance import (
    Status,
    backward_search,
    combinatorial_inv,
    is_compatible,
    is_isolating,
    periodic_in,
    prune,
    relevant_endpoints,
)
from pcm_conley.lifted import LiftedDigraph, build_lifted
from pcm_conley.numerics import RatInterval
from pcm_conley.pcm_model import PCMap, list_adjoints, make_piece
from pcm_conley.wazewski import Witness, find_invariant_witness


def bare_digraph(n, edges):
    succ = [[] for _ in range(n)]
    pred = [[] for _ in range(n)]
    for u, v in edges:
        succ[u].append(v)
        pred[v].append(u)
    return LiftedDigraph(None, None, 1, [None] * n, succ, pred)


def test_self_loop_survives():
    assert combinatorial_inv(bare_digraph(1, [(0, 0)])).cinv == {0}


def test_chain_dies():
    inv = combinatorial_inv(bare_digraph(2, [(0, 1)]))
    assert inv.cinv == set()
    assert inv.cinv_plus == set() and inv.cinv_minus == set()


def _random_digraph(rng):
    n = rng.randint(1, 25)
    edges = {(rng.randrange(n), rng.randrange(n)) for _ in range(rng.randint(0, 2 * n))}
    return bare_digraph(n, sorted(edges))


def test_pruning_is_confluent_and_fixed():
    rng = random.Random(11)
    for _ in range(300):
        d = _random_digraph(rng)
        inv = combinatorial_inv(d)
        assert inv.cinv == inv.cinv_minus & inv.cinv_plus
        assert inv.rounds <= len(d)
        for v in inv.cinv:
            assert any(w in inv.cinv for w in d.succ[v])
            assert any(u in inv.cinv for u in d.pred[v])
        for seed in range(2):
            alive, _ = prune(d, range(len(d)), rng=random.Random(seed))
            assert alive == inv.cinv


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_pruning_confluence_on_fixtures(name):
    mk, N = FIXTURES[name]
    d = build_lifted(mk(), N, 3, 3)
    inv = combinatorial_inv(d)
    for seed in range(2):
        alive, _ = prune(d, range(len(d)), rng=random.Random(seed))
        assert alive == inv.cinv


def test_jump_map_invariant_cells():
    d = build_lifted(jump_map(), JUMP_N, 2, 2)
    inv = combinatorial_inv(d)
    spans = {d.project(v) for v in inv.cinv}
    for v in inv.cinv:
        assert d.vertices[v].word == (0, 0)
        assert d.project(v).hi <= Q(1, 2)
    left = [c.span for c in d.grid.cells if c.span.hi <= Q(1, 2)]
    assert set(left) <= spans


def test_worked_map_isolated_and_compatible():
    m = seven_branch_map()
    assert is_isolating(m, SEVEN_BRANCH_N, 3, 4).status is Status.CERTIFIED
    v = is_compatible(m, SEVEN_BRANCH_N, 3, 4)
    assert v.status is Status.CERTIFIED
    assert v.evidence["boundary_discontinuities"] == ["-1/3", "4/3"]
    assert {e["method"] for e in v.evidence["endpoints"].values()} == {"exclusion"}


def test_jump_map_isolated():
    assert is_isolating(jump_map(), JUMP_N, 3, 4).status is Status.CERTIFIED
    assert relevant_endpoints(jump_map(), JUMP_N) == [Q(3, 5)]


def test_identity_map_not_isolated():
    v = is_isolating(identity_map(), RatInterval(0, Q(1, 2)), 2, 2)
    assert v.status is Status.VIOLATED
    assert v.evidence["invariant_orbit"] == ["1/2"]


def test_adjoint_witness_trivially_compatible():
    v = is_compatible(adjoint_witness_map(), ADJOINT_WITNESS_N, 3, 4)
    assert v.status is Status.CERTIFIED and v.evidence["boundary_discontinuities"] == []


def test_fixed_boundary_discontinuity_violates_compatibility():
    v = is_compatible(adjoint_witness_map(), RatInterval(Q(1, 4), Q(1, 2)), 3, 4)
    assert v.status is Status.VIOLATED
    per = v.evidence["endpoints"]["1/2"]["adjoints"]
    assert per["{1/2->0}"]["chain"] == ["1/2", "1/2"]
    assert per["f"]["outcome"] == "finite"


def test_split_identity_violates_compatibility():
    m = PCMap.from_pieces(
        RatInterval(0, 1), [make_piece(0, Q(1, 2), 1, 0), make_piece(Q(1, 2), 1, 1, 0, True, True)]
    )
    v = is_compatible(m, RatInterval(Q(1, 4), Q(1, 2)), 2, 2)
    assert v.status is Status.VIOLATED


def test_backward_search_outcomes():
    m = jump_map()
    # 3/4 has the backward chain 3/4 <- 1/2 under f, and 1/2 has no preimage in [1/2,1]
    assert backward_search(m, None, RatInterval(Q(1, 2), 1), Q(3, 4), 12).outcome == "finite"
    # under the identity branch every point is its own preimage
    assert backward_search(m, None, RatInterval(0, Q(1, 2)), Q(1, 4), 12).outcome == "cycle"


@pytest.mark.parametrize("name", ["seven-branch", "jump", "adjoint-witness"])
def test_exclusion_agrees_with_exhaustive_search(name):
    mk, N = FIXTURES[name]
    m = mk()
    fast = is_compatible(m, N, 3, 4)
    exact = is_compatible(m, N, 3, 4, backward_bound=12, force_exact=True)
    for b, entry in fast.evidence["endpoints"].items():
        if entry["method"] == "exclusion":
            outcomes = {a["outcome"] for a in exact.evidence["endpoints"][b]["adjoints"].values()}
            assert outcomes == {"finite"}, (name, b, outcomes)


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_isolation_certificates_have_no_boundary_orbits(name):
    mk, N = FIXTURES[name]
    m = mk()
    if is_isolating(m, N, 3, 4).status is not Status.CERTIFIED:
        pytest.skip("not certified at this resolution")
    for e in relevant_endpoints(m, N):
        for g in list_adjoints(m):
            assert periodic_in(m, e, N, 8, g) is None


@pytest.mark.parametrize("name", ["seven-branch", "jump", "adjoint-witness", "attractor", "repeller"])
def test_witness_orbits_lie_in_the_invariant_set(name):
    mk, N = FIXTURES[name]
    m = mk()
    w = find_invariant_witness(m, N, 4)
    assert isinstance(w, Witness)
    for k, depth in [(2, 2), (3, 4), (4, 5)]:
        d = build_lifted(m, N, k, depth)
        inv = combinatorial_inv(d)
        cycle = w.symbol_word * (k + 1)
        for t, x in enumerate(w.orbit):
            assert set(d.locate(x, cycle[t : t + k])) & inv.cinv, (name, k, depth, x)


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_refinement_shrinks_the_projected_invariant_set(name):
    mk, N = FIXTURES[name]
    m = mk()

    def covered(k, depth):
        d = build_lifted(m, N, k, depth)
        return [d.project(v) for v in combinatorial_inv(d).cinv]

    blocks = []
    for iv in sorted(covered(2, 2)):
        if blocks and iv.lo <= blocks[-1][1]:
            blocks[-1][1] = max(blocks[-1][1], iv.hi)
        else:
            blocks.append([iv.lo, iv.hi])
    for iv in covered(3, 3):
        assert any(lo <= iv.lo and iv.hi <= hi for lo, hi in blocks), (name, iv)
