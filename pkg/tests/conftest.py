from __future__ import annotations

import random
from fractions import Fraction as Q

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from pcm_conley.numerics import RatInterval
from pcm_conley.pcm_model import PCMap, make_piece

settings.register_profile(
    "default", max_examples=100, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def criterion():
    """Record an acceptance outcome; the terminal summary prints one line each."""

    def record(number: int, ok: bool, detail: str) -> bool:
        ACCEPTANCE[number] = (ok, detail)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")


def rationals(lo=-2, hi=2, max_den=24):
    return st.fractions(min_value=Q(lo), max_value=Q(hi), max_denominator=max_den)


@st.composite
def intervals(draw, lo=-2, hi=2, max_den=24):
    a, b = draw(rationals(lo, hi, max_den)), draw(rationals(lo, hi, max_den))
    return RatInterval(min(a, b), max(a, b))


def random_pcm(rng: random.Random, max_pieces: int = 4) -> PCMap:
    """A valid self-map of [0,1] with half-open pieces and affine branches.

    Each branch is fitted so that its closure image stays inside [0,1].
    """
    n = rng.randint(1, max_pieces)
    cuts = sorted({Q(rng.randint(1, 11), 12) for _ in range(n - 1)})
    ends = [Q(0), *cuts, Q(1)]
    pieces = []
    for i, (lo, hi) in enumerate(zip(ends, ends[1:])):
        u, v = Q(rng.randint(0, 8), 8), Q(rng.randint(0, 8), 8)
        a = (v - u) / (hi - lo)
        pieces.append(make_piece(lo, hi, a, u - a * lo, True, i == len(ends) - 2))
    return PCMap.from_pieces(RatInterval(0, 1), pieces, "random")


def random_region(rng: random.Random) -> RatInterval:
    a, b = sorted(rng.sample(range(0, 17), 2))
    return RatInterval(Q(a, 16), Q(b, 16))
