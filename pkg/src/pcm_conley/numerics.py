"""Exact rationals and closed rational intervals.

All coordinates are :class:`fractions.Fraction` values; nothing in the
package ever touches floating point.  An empty intersection is reported as
``None``, which is distinct from any (possibly degenerate) interval.
"""

from __future__ import annotations

import operator
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

Rational = Fraction
RationalLike = Union[Fraction, int, str]

__all__ = [
    "Rational",
    "RatInterval",
    "as_rational",
    "format_rational",
    "rat_arith",
    "affine_image",
    "interval_meet",
]


def as_rational(value: RationalLike) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a canonical Fraction.

    Floats are refused: accepting them would smuggle binary rounding into
    an exact computation.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if "." in text or "e" in text.lower():
            raise ValueError(f"not an exact rational: {value!r}")
        return Fraction(text)
    raise TypeError(f"cannot interpret {type(value).__name__} as an exact rational")


def format_rational(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


_OPS = {
    "+": operator.add,
    "-": operator.sub,
    "*": operator.mul,
    "/": operator.truediv,
}


def rat_arith(a: RationalLike, b: RationalLike, op: str):
    """Apply ``op`` in ``{+, -, *, /, cmp}`` exactly.

    ``cmp`` returns -1, 0 or 1.  Division by zero raises ZeroDivisionError.
    """
    a, b = as_rational(a), as_rational(b)
    if op == "cmp":
        return (a > b) - (a < b)
    try:
        fn = _OPS[op]
    except KeyError:
        raise ValueError(f"unknown operation {op!r}") from None
    return fn(a, b)


@dataclass(frozen=True, order=True)
class RatInterval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        lo, hi = as_rational(self.lo), as_rational(self.hi)
        if lo > hi:
            raise ValueError(f"empty interval [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def point(cls, x: RationalLike) -> "RatInterval":
        x = as_rational(x)
        return cls(x, x)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    @property
    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def __contains__(self, x) -> bool:
        x = as_rational(x)
        return self.lo <= x <= self.hi

    def contains_interval(self, other: "RatInterval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def meet(self, other: "RatInterval") -> Optional["RatInterval"]:
        return interval_meet(self, other)

    def overlaps_properly(self, other: "RatInterval") -> bool:
        """True when the intersection has positive length."""
        return max(self.lo, other.lo) < min(self.hi, other.hi)

    def __str__(self) -> str:
        return f"[{format_rational(self.lo)},{format_rational(self.hi)}]"


def affine_image(iv: RatInterval, a: RationalLike, b: RationalLike) -> RatInterval:
    """Exact image of ``iv`` under ``x -> a*x + b``."""
    a, b = as_rational(a), as_rational(b)
    u, v = a * iv.lo + b, a * iv.hi + b
    if u > v:
        u, v = v, u
    return RatInterval(u, v)


def affine_preimage(iv: RatInterval, a: RationalLike, b: RationalLike) -> Optional[RatInterval]:
    """Exact preimage ``{x : a*x + b in iv}`` as an interval.

    For ``a == 0`` the preimage is all of the line or nothing; the whole line
    cannot be represented, so callers intersect with a bounded set first via
    :func:`affine_preimage_within`.
    """
    a, b = as_rational(a), as_rational(b)
    if a == 0:
        raise ValueError("constant branch has an unbounded preimage")
    u, v = (iv.lo - b) / a, (iv.hi - b) / a
    if u > v:
        u, v = v, u
    return RatInterval(u, v)


def affine_preimage_within(
    domain: RatInterval, iv: RatInterval, a: RationalLike, b: RationalLike
) -> Optional[RatInterval]:
    """``{x in domain : a*x + b in iv}``, or None when empty."""
    a, b = as_rational(a), as_rational(b)
    if a == 0:
        return domain if b in iv else None
    return interval_meet(domain, affine_preimage(iv, a, b))


def interval_meet(u: RatInterval, v: RatInterval) -> Optional[RatInterval]:
    lo, hi = max(u.lo, v.lo), min(u.hi, v.hi)
    if lo > hi:
        return None
    return RatInterval(lo, hi)
