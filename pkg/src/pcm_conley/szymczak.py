"""Morphisms of the Szymczak category at matrix level and Leray reduction.

Integer matrices are numpy arrays of Python ints (``dtype=object``) so that
powers never overflow.  Rational work (eventual images, similarity) goes
through sympy.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np
import sympy

from .numerics import format_rational


def as_matrix(data, dim: Optional[int] = None) -> np.ndarray:
    if isinstance(data, np.ndarray) and data.dtype == object:
        return data
    arr = np.array([[int(x) for x in row] for row in data], dtype=object)
    if arr.size == 0:
        n = dim if dim is not None else len(data)
        return np.zeros((n, n), dtype=object)
    return arr.reshape(arr.shape[0], -1)


def identity(n: int) -> np.ndarray:
    out = np.zeros((n, n), dtype=object)
    for i in range(n):
        out[i, i] = 1
    return out


def mat_power(f: np.ndarray, n: int) -> np.ndarray:
    out = identity(f.shape[0])
    for _ in range(n):
        out = out.dot(f)
    return out


def _is_zero(a: np.ndarray) -> bool:
    return not any(a.flat)


@dataclass
class SzMorphism:
    """Representative ``(phi, n)`` of a morphism ``(X, f) -> (X', f')``."""

    phi: np.ndarray
    n: int
    source: np.ndarray
    target: np.ndarray

    def __post_init__(self):
        self.source = as_matrix(self.source)
        self.target = as_matrix(self.target)
        self.phi = as_matrix(self.phi)
        if self.phi.size == 0:
            self.phi = np.zeros((self.target.shape[0], self.source.shape[0]), dtype=object)
        if self.n < 0:
            raise ValueError("shift must be nonnegative")
        if self.phi.shape != (self.target.shape[0], self.source.shape[0]):
            raise ValueError(f"phi has shape {self.phi.shape}")
        if not _is_zero(self.phi.dot(self.source) - self.target.dot(self.phi)):
            raise ValueError("phi does not intertwine the endomorphisms")


def sz_identity(f) -> SzMorphism:
    f = as_matrix(f)
    return SzMorphism(identity(f.shape[0]), 0, f, f)


def _same_hom(m1: SzMorphism, m2: SzMorphism) -> None:
    if m1.source.shape != m2.source.shape or m1.target.shape != m2.target.shape:
        raise ValueError("morphisms have different source or target shapes")
    if not (np.array_equal(m1.source, m2.source) and np.array_equal(m1.target, m2.target)):
        raise ValueError("morphisms have different source or target endomorphisms")


def szymczak_equal(m1: SzMorphism, m2: SzMorphism) -> tuple[bool, Optional[int]]:
    """Decide ``(phi1, n1) ~ (phi2, n2)``; returns the least certificate ``k``.

    The relation reads ``D f^k = 0`` with ``D = phi1 f^n2 - phi2 f^n1``.  The
    images of ``f^k`` stop shrinking once ``k`` reaches the dimension, so
    ``k <= dim`` decides it.
    """
    _same_hom(m1, m2)
    f = m1.source
    delta = m1.phi.dot(mat_power(f, m2.n)) - m2.phi.dot(mat_power(f, m1.n))
    for k in range(f.shape[0] + 1):
        if _is_zero(delta):
            return True, k
        delta = delta.dot(f)
    return False, None


def szymczak_equal_bruteforce(m1: SzMorphism, m2: SzMorphism, kmax: int) -> tuple[bool, Optional[int]]:
    """Literal search over the defining diagram for ``k = 0..kmax``."""
    _same_hom(m1, m2)
    f = m1.source
    for k in range(kmax + 1):
        left = m2.phi.dot(mat_power(f, m1.n + k))
        right = m1.phi.dot(mat_power(f, m2.n + k))
        if np.array_equal(left, right):
            return True, k
    return False, None


def compose(m2: SzMorphism, m1: SzMorphism) -> SzMorphism:
    if not np.array_equal(m1.target, m2.source):
        raise ValueError("target of the first morphism is not the source of the second")
    return SzMorphism(m2.phi.dot(m1.phi), m1.n + m2.n, m1.source, m2.target)


@dataclass
class LerayBlock:
    block: sympy.Matrix
    basis: sympy.Matrix

    @property
    def size(self) -> int:
        return self.block.shape[0]


def _sym(m) -> sympy.Matrix:
    m = as_matrix(m)
    return sympy.Matrix(m.shape[0], m.shape[1], [sympy.Integer(int(x)) for x in m.flat])


def leray_reduce(M) -> LerayBlock:
    """Restriction of ``M`` to the image of ``M**dim``: invertible, unique up to similarity."""
    S = _sym(M)
    n = S.shape[0]
    if n == 0:
        return LerayBlock(sympy.zeros(0, 0), sympy.zeros(0, 0))
    cols = (S**n).columnspace()
    if not cols:
        return LerayBlock(sympy.zeros(0, 0), sympy.zeros(n, 0))
    B = sympy.Matrix.hstack(*cols)
    L = (B.T * B).inv() * B.T * S * B
    assert S * B == B * L
    return LerayBlock(L, B)


def reduced_char_poly(M) -> list[int]:
    """Characteristic polynomial with every factor of x removed (leading coefficient first)."""
    S = _sym(M)
    if S.shape[0] == 0:
        return [1]
    coeffs = [int(c) for c in S.charpoly().all_coeffs()]
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs


def similar_over_q(A: sympy.Matrix, B: sympy.Matrix) -> bool:
    """Rational similarity via invariant factors of ``xI - A`` over Q[x]."""
    if A.shape != B.shape:
        return False
    if A.shape[0] == 0:
        return True
    from sympy.polys.matrices import DomainMatrix
    from sympy.polys.matrices.normalforms import invariant_factors

    x = sympy.Symbol("x")
    ring = sympy.QQ[x]
    n = A.shape[0]

    def factors(M):
        dm = DomainMatrix.from_Matrix(x * sympy.eye(n) - M).convert_to(ring)
        return [ring.to_sympy(f).as_poly(x).monic() for f in invariant_factors(dm)]

    return factors(A) == factors(B)


def _permutation_conjugate(A: np.ndarray, B: np.ndarray, limit: int = 7) -> bool:
    n = A.shape[0]
    if A.shape != B.shape:
        return False
    if n > limit:
        return False
    for perm in itertools.permutations(range(n)):
        idx = list(perm)
        if np.array_equal(A[np.ix_(idx, idx)], B):
            return True
    return False


@dataclass
class ConleyIndexClass:
    graded: dict  # degree -> integer matrix (np object array)
    leray: dict  # degree -> LerayBlock
    char_poly_reduced: dict  # degree -> list[int]
    trivial: bool
    label: str = "homological Conley index"
    generators: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {"label": self.label, "trivial": self.trivial, "degrees": {}}
        for deg in sorted(self.graded):
            lb = self.leray[deg]
            out["degrees"][str(deg)] = {
                "matrix": [[int(x) for x in row] for row in self.graded[deg].tolist()],
                "leray_block": [
                    [format_rational(Fraction(int(e.p), int(e.q))) for e in lb.block.row(i)]
                    for i in range(lb.size)
                ],
                "leray_size": lb.size,
                "char_poly_reduced": self.char_poly_reduced[deg],
                "nilpotent": lb.size == 0,
                "generators": self.generators.get(deg, []),
            }
        return out


def index_class(graded, generators: Optional[dict] = None) -> ConleyIndexClass:
    """Leray blocks, reduced characteristic polynomials and triviality per degree."""
    if hasattr(graded, "matrices"):
        generators = generators or graded.generators
        graded = {deg: as_matrix(mat, len(graded.generators.get(deg, []))) for deg, mat in graded.matrices.items()}
    else:
        graded = {deg: as_matrix(mat) for deg, mat in graded.items()}
    leray = {deg: leray_reduce(mat) for deg, mat in graded.items()}
    for deg, lb in leray.items():
        if lb.size and lb.block.det() == 0:
            raise AssertionError(f"Leray block in degree {deg} is singular")
    polys = {deg: reduced_char_poly(mat) for deg, mat in graded.items()}
    trivial = all(lb.size == 0 for lb in leray.values())
    return ConleyIndexClass(graded, leray, polys, trivial, generators=generators or {})


def compare_classes(c1: ConleyIndexClass, c2: ConleyIndexClass) -> str:
    """``equivalent``, ``distinct`` or ``undetermined``.

    Distinct Leray blocks over Q rule out shift equivalence.  Equivalence is
    only certified when the matrices agree up to a permutation of generators
    (conjugate over Z); other rationally similar pairs stay undetermined.
    """
    degrees = sorted(set(c1.graded) | set(c2.graded))
    empty = LerayBlock(sympy.zeros(0, 0), sympy.zeros(0, 0))
    for deg in degrees:
        if not similar_over_q(c1.leray.get(deg, empty).block, c2.leray.get(deg, empty).block):
            return "distinct"
    if all(
        c1.leray.get(deg, empty).size == 0
        or _permutation_conjugate(c1.graded[deg], c2.graded.get(deg, np.zeros((0, 0), dtype=object)))
        for deg in degrees
    ):
        return "equivalent"
    return "undetermined"
