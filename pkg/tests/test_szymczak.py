import random

import numpy as np
import pytest
import sympy

from pcm_conley.szymczak import (
    SzMorphism,
    as_matrix,
    compare_classes,
    compose,
    identity,
    index_class,
    leray_reduce,
    mat_power,
    reduced_char_poly,
    similar_over_q,
    sz_identity,
    szymczak_equal,
    szymczak_equal_bruteforce,
)


def rand_matrix(rng, n, lo=-3, hi=3):
    return as_matrix([[rng.randint(lo, hi) for _ in range(n)] for _ in range(n)])


def rand_endomorphism(rng):
    """Random square matrix, half the time with a planted nilpotent block."""
    n = rng.randint(1, 6)
    f = rand_matrix(rng, n)
    if rng.random() < 0.5:
        cut = rng.randint(0, n)
        for i in range(n):
            for j in range(n):
                if i >= cut and j <= i:
                    f[i, j] = 0
    return f


def poly_in(f, coeffs):
    out = np.zeros(f.shape, dtype=object)
    for power, c in enumerate(coeffs):
        out = out + c * mat_power(f, power)
    return out


def test_powers_of_h_are_the_identity_class():
    rng = random.Random(1)
    for _ in range(200):
        h = rand_endomorphism(rng)
        m, n = rng.randint(0, 4), rng.randint(0, 4)
        hm = SzMorphism(mat_power(h, m), m, h, h)
        hn = SzMorphism(mat_power(h, n), n, h, h)
        assert szymczak_equal(hm, hn)[0]
        assert szymczak_equal(hm, sz_identity(h))[0]


def test_decision_bound_agrees_with_brute_force():
    rng = random.Random(2)
    seen = {True: 0, False: 0}
    for _ in range(200):
        f = rand_endomorphism(rng)
        n = f.shape[0]
        p1 = [rng.randint(-2, 2) for _ in range(3)]
        n1, n2 = rng.randint(0, 3), rng.randint(0, 3)
        if rng.random() < 0.5:
            # an equivalent pair: shift a representative by one step
            m1, m2 = SzMorphism(poly_in(f, p1), n1, f, f), SzMorphism(poly_in(f, p1).dot(f), n1 + 1, f, f)
        else:
            p2 = [rng.randint(-2, 2) for _ in range(3)]
            m1, m2 = SzMorphism(poly_in(f, p1), n1, f, f), SzMorphism(poly_in(f, p2), n2, f, f)
        fast, k = szymczak_equal(m1, m2)
        slow, k_slow = szymczak_equal_bruteforce(m1, m2, 3 * n)
        assert fast == slow
        if fast:
            assert k == k_slow and k <= n
        seen[fast] += 1
    assert seen[True] > 50 and seen[False] > 20


def test_equivalence_laws():
    rng = random.Random(3)
    for _ in range(60):
        f = rand_endomorphism(rng)
        a = SzMorphism(poly_in(f, [rng.randint(-2, 2), 1]), rng.randint(0, 2), f, f)
        b = SzMorphism(a.phi.dot(f), a.n + 1, f, f)
        c = SzMorphism(b.phi.dot(mat_power(f, 2)), b.n + 2, f, f)
        assert szymczak_equal(a, a) == (True, 0)
        assert szymczak_equal(a, b)[0] == szymczak_equal(b, a)[0] is True
        assert szymczak_equal(a, c)[0]


def test_nilpotent_parts_collapse():
    f = as_matrix([[0]])
    ok, k = szymczak_equal(SzMorphism(identity(1), 0, f, f), SzMorphism(as_matrix([[0]]), 0, f, f))
    assert ok and k == 1


def test_shapes_must_match():
    f, g = identity(2), identity(3)
    with pytest.raises(ValueError):
        szymczak_equal(sz_identity(f), sz_identity(g))
    with pytest.raises(ValueError):
        SzMorphism(as_matrix([[1, 0], [0, 1]]), 0, as_matrix([[1, 1], [0, 1]]), as_matrix([[1, 0], [0, 2]]))


def test_composition():
    rng = random.Random(4)
    for _ in range(60):
        f = rand_endomorphism(rng)
        a = SzMorphism(poly_in(f, [rng.randint(-2, 2), rng.randint(-1, 1)]), 2, f, f)
        b = SzMorphism(poly_in(f, [1, rng.randint(-1, 1)]), 3, f, f)
        c = SzMorphism(poly_in(f, [rng.randint(-1, 1), 1]), 1, f, f)
        assert compose(b, a).n == 5
        assert szymczak_equal(compose(sz_identity(f), a), a)[0]
        assert szymczak_equal(compose(a, sz_identity(f)), a)[0]
        assert szymczak_equal(compose(c, compose(b, a)), compose(compose(c, b), a))[0]
        # compose respects the relation
        a2 = SzMorphism(a.phi.dot(f), a.n + 1, f, f)
        b2 = SzMorphism(b.phi.dot(mat_power(f, 2)), b.n + 2, f, f)
        assert szymczak_equal(compose(b, a), compose(b2, a2))[0]


def test_leray_examples():
    assert leray_reduce([[0, 1], [0, 0]]).size == 0
    assert leray_reduce([[1, 1], [0, 0]]).block == sympy.Matrix([[1]])
    inv = [[2, 1], [1, 1]]
    assert similar_over_q(leray_reduce(inv).block, sympy.Matrix(inv))


def _unimodular(rng, n):
    s = sympy.eye(n)
    for _ in range(3 * n):
        i, j = rng.sample(range(n), 2) if n > 1 else (0, 0)
        if i != j:
            e = sympy.eye(n)
            e[i, j] = rng.choice([-1, 1])
            s = s * e
    return s


def test_leray_block_is_a_similarity_invariant():
    rng = random.Random(5)
    for _ in range(40):
        f = rand_endomorphism(rng)
        n = f.shape[0]
        S = _unimodular(rng, n)
        M = sympy.Matrix(f.tolist())
        conj = S * M * S.inv()
        a, b = leray_reduce(f), leray_reduce(as_matrix(conj.tolist()))
        assert a.size == b.size
        assert similar_over_q(a.block, b.block)


def test_index_class_examples():
    worked = [[0, 0, 0, 0, 0], [0, 0, 1, 0, 1], [0, 0, 0, 1, 0], [1, 1, 0, 0, 0], [0, 0, 0, 0, 0]]
    c = index_class({0: worked, 1: []})
    assert not c.trivial and c.leray[0].size == 3
    assert c.char_poly_reduced[0] == [1, 0, 0, -1]
    assert index_class({0: [[0, 0], [0, 0]]}).trivial
    att = index_class({0: [[1]]})
    assert att.leray[0].block == sympy.Matrix([[1]]) and att.char_poly_reduced[0] == [1, -1]
    assert reduced_char_poly([[1, 1], [0, 0]]) == [1, -1]


def test_class_comparison():
    cyc = [[0, 1, 0], [0, 0, 1], [1, 0, 0]]
    perm = [[0, 0, 1], [1, 0, 0], [0, 1, 0]]
    assert compare_classes(index_class({0: cyc}), index_class({0: perm})) == "equivalent"
    assert compare_classes(index_class({0: [[1]]}), index_class({0: [[-1]]})) == "distinct"
    assert compare_classes(index_class({0: [[2, 1], [1, 1]]}), index_class({0: [[3, 1], [-1, 0]]})) == "undetermined"
