"""Built-in maps used by the CLI and the test-suite."""

from __future__ import annotations

from fractions import Fraction as Q

from .numerics import RatInterval
from .pcm_model import PCMap, make_piece, single_piece_map


def seven_branch_map() -> PCMap:
    """The seven-branch map on [-1, 2] with neighbourhood [-1/3, 4/3]."""
    return PCMap.from_pieces(
        RatInterval(-1, 2),
        [
            make_piece(-1, Q(-1, 3), 1, Q(1, 3)),
            make_piece(Q(-1, 3), 0, 1, 1),
            make_piece(0, Q(1, 3), 1, Q(2, 3)),
            make_piece(Q(1, 3), Q(2, 3), 1, Q(-1, 3)),
            make_piece(Q(2, 3), 1, -1, Q(4, 3)),
            make_piece(1, Q(4, 3), 1, -1),
            make_piece(Q(4, 3), 2, 1, Q(-1, 3), hi_closed=True),
        ],
        name="seven-branch",
    )


SEVEN_BRANCH_N = RatInterval(Q(-1, 3), Q(4, 3))


def jump_map() -> PCMap:
    """x on [0,1/2), x/2 + 1/2 on [1/2,1]; Inv of [0,3/5] is [0,1/2)."""
    return PCMap.from_pieces(
        RatInterval(0, 1),
        [
            make_piece(0, Q(1, 2), 1, 0),
            make_piece(Q(1, 2), 1, Q(1, 2), Q(1, 2), hi_closed=True),
        ],
        name="jump",
    )


JUMP_N = RatInterval(0, Q(3, 5))


def adjoint_witness_map() -> PCMap:
    """Contraction toward 1/2 from the left; the fixed point belongs to the other piece."""
    return PCMap.from_pieces(
        RatInterval(0, 1),
        [
            make_piece(0, Q(1, 2), Q(1, 2), Q(1, 4)),
            make_piece(Q(1, 2), 1, Q(1, 2), Q(1, 2), hi_closed=True),
        ],
        name="adjoint-witness",
    )


ADJOINT_WITNESS_N = RatInterval(Q(1, 4), Q(3, 4))


def attractor_map() -> PCMap:
    return single_piece_map(RatInterval(-1, 1), Q(1, 2), 0, name="attractor")


def repeller_map() -> PCMap:
    return single_piece_map(RatInterval(-1, 1), 2, 0, name="repeller")


def flip_repeller_map() -> PCMap:
    return single_piece_map(RatInterval(-1, 1), -2, 0, name="flip-repeller")


HALF_N = RatInterval(Q(-1, 2), Q(1, 2))


def identity_map() -> PCMap:
    return single_piece_map(RatInterval(0, 1), 1, 0, name="identity")


FIXTURES = {
    "seven-branch": (seven_branch_map, SEVEN_BRANCH_N),
    "jump": (jump_map, JUMP_N),
    "adjoint-witness": (adjoint_witness_map, ADJOINT_WITNESS_N),
    "attractor": (attractor_map, HALF_N),
    "repeller": (repeller_map, HALF_N),
    "flip-repeller": (flip_repeller_map, HALF_N),
}
