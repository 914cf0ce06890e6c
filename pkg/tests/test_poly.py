import random

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from heckecong.dihedral import half_cyclotomic
from heckecong.poly import (
    CharpolyError,
    IntPoly,
    ModPoly,
    certify_irreducible,
    charpoly_int_matrix,
    charpoly_mod_p,
    distinct_degree_profile,
    factor_mod_p,
    factor_over_Z,
    is_irreducible_mod_p,
    largest_irreducible_degree_mod_p,
    poly_divides_mod_p,
    reduce_mod,
    squarefree_decomposition,
)

X = IntPoly.x()
ROUNDTRIP_CASES = 1000


def _sym(f: IntPoly):
    x = sympy.Symbol("x")
    return sympy.Poly(list(reversed(f.coeffs)), x)


def _random_modpoly(rnd: random.Random, p: int, deg: int) -> ModPoly:
    coeffs = [rnd.randrange(p) for _ in range(deg)] + [1]
    return ModPoly(p, coeffs)


# --- reduction and division ---


def test_reduce_examples():
    quintic = IntPoly([1, -2, -9, -4, 2, 1])
    assert reduce_mod(quintic, 2) == ModPoly(2, [1, 0, 1, 0, 0, 1])
    assert reduce_mod(IntPoly(), 5).is_zero
    assert reduce_mod(2 * X + 1, 2) == ModPoly(2, [1])


@given(
    st.lists(st.integers(-(10**6), 10**6), max_size=8),
    st.lists(st.integers(-(10**6), 10**6), max_size=8),
    st.sampled_from([2, 3, 5, 7, 101, 32749]),
)
def test_reduce_is_a_ring_homomorphism(a, b, p):
    f, g = IntPoly(a), IntPoly(b)
    assert reduce_mod(f + g, p) == reduce_mod(f, p) + reduce_mod(g, p)
    assert reduce_mod(f * g, p) == reduce_mod(f, p) * reduce_mod(g, p)


def test_divides_examples():
    f = ModPoly(2, [1, 0, 0, 1, 1])
    assert poly_divides_mod_p(ModPoly(2, [1]), f)
    assert not poly_divides_mod_p(ModPoly(2, [0, 1]), ModPoly(2, [1, 1]))
    with pytest.raises(ZeroDivisionError):
        poly_divides_mod_p(ModPoly(2, []), f)


# --- factorization over F_p ---


def test_factor_mod_p_examples():
    psi = half_cyclotomic(31)
    F = factor_mod_p(reduce_mod(psi, 2))
    assert [str(g) for g, _ in F.factors] == ["X^5 + X^2 + 1", "X^5 + X^3 + 1", "X^5 + X^4 + X^3 + X^2 + 1"]
    assert largest_irreducible_degree_mod_p(reduce_mod(psi, 2)) == 5
    assert factor_mod_p(ModPoly(5, [0, 0, 1])).factors == ((ModPoly(5, [0, 1]), 2),)
    assert factor_mod_p(ModPoly(2, [1, 0, 1])).factors == ((ModPoly(2, [1, 1]), 2),)
    assert largest_irreducible_degree_mod_p(ModPoly(7, [0, 1])) == 1
    f = ModPoly(2, [1, 0, 1]) * ModPoly(2, [1, 1, 0, 1])
    assert largest_irreducible_degree_mod_p(f) == 3


@pytest.mark.parametrize("p", [2, 3, 5, 7, 31, 32749])
def test_factor_mod_p_roundtrip(p):
    rnd = random.Random(p)
    for _ in range(ROUNDTRIP_CASES):
        parts = [_random_modpoly(rnd, p, rnd.randint(1, 4)) for _ in range(rnd.randint(1, 4))]
        f = parts[0]
        for g in parts[1:]:
            f = f * g
        F = factor_mod_p(f)
        assert F.verify()
        for g, m in F.factors:
            assert g.lc == 1 and m >= 1
            assert is_irreducible_mod_p(g)
        # the product of the pieces factors into at least as many irreducibles
        assert sum(m for _, m in F.factors) >= len(parts)


@given(st.lists(st.integers(0, 6), min_size=2, max_size=30).filter(lambda c: c[-1] % 7))
def test_ddf_profile_matches_full_factorization(coeffs):
    f = ModPoly(7, coeffs)
    F = factor_mod_p(f)
    from_factors: dict[int, int] = {}
    for g, _ in F.factors:
        from_factors[g.degree] = from_factors.get(g.degree, 0) + 1
    prof = distinct_degree_profile(f)
    assert set(prof) == set(from_factors)
    assert largest_irreducible_degree_mod_p(f) == max(from_factors, default=0)


def test_irreducibility_against_sympy():
    rnd = random.Random(11)
    for _ in range(300):
        f = _random_modpoly(rnd, 3, rnd.randint(1, 9))
        x = sympy.Symbol("x")
        ref = sympy.Poly(list(reversed([int(c) for c in f.coeffs])), x, modulus=3).is_irreducible
        assert is_irreducible_mod_p(f) == ref


# --- factorization over Z ---


def _random_intpoly(rnd: random.Random, deg: int, lead: int = 1) -> IntPoly:
    return IntPoly([rnd.randint(-9, 9) for _ in range(deg)] + [lead])


def test_factor_over_Z_examples():
    F = factor_over_Z(X**2 - 1)
    assert [str(g) for g, _ in F.factors] == ["X - 1", "X + 1"]
    quintic = X**5 + X**2 + 1
    F = factor_over_Z(quintic)
    assert F.certified and F.factors == ((quintic, 1),)
    assert certify_irreducible(quintic)


def test_factor_over_Z_roundtrip():
    rnd = random.Random(2024)
    for _ in range(ROUNDTRIP_CASES):
        parts = [_random_intpoly(rnd, rnd.randint(1, 4)) for _ in range(rnd.randint(1, 3))]
        f = parts[0]
        for g in parts[1:]:
            f = f * g
        if rnd.random() < 0.2:
            f = f * rnd.choice([-1, 2, -3, 6])
        F = factor_over_Z(f)
        assert F.verify()
        assert F.certified
        ref = sympy.factor_list(_sym(f).as_expr())
        ref_degrees = sorted(
            (sympy.degree(g) for g, m in ref[1] for _ in range(m) if sympy.degree(g) > 0), reverse=True
        )
        assert F.degrees() == ref_degrees


@given(st.lists(st.integers(-50, 50), min_size=1, max_size=7).filter(lambda c: c[-1] != 0))
@settings(max_examples=200)
def test_squarefree_decomposition_multiplies_back(coeffs):
    f = IntPoly(coeffs) ** 2 * (X + 3)
    prod = IntPoly([1])
    for g, m in squarefree_decomposition(f):
        prod = prod * g**m
    assert prod.primitive() == f.primitive() or prod.primitive() == (-f).primitive()


def test_rejects_zero():
    with pytest.raises(ValueError):
        factor_over_Z(IntPoly())


# --- characteristic polynomials ---


def test_charpoly_examples():
    assert charpoly_int_matrix([[-2]]) == X + 2
    assert charpoly_int_matrix(np.eye(3, dtype=np.int64)) == (X - 1) ** 3


@pytest.mark.parametrize("n", list(range(1, 13)))
def test_charpoly_against_berkowitz(n):
    rnd = random.Random(n)
    for _ in range(3):
        A = [[rnd.randint(-30, 30) for _ in range(n)] for _ in range(n)]
        ref = sympy.Matrix(A).charpoly(sympy.Symbol("x")).all_coeffs()
        assert charpoly_int_matrix(A).coeffs == tuple(int(c) for c in reversed(ref))


def test_charpoly_mod_p_agrees_with_integer_charpoly():
    rnd = random.Random(5)
    A = np.array([[rnd.randint(-99, 99) for _ in range(9)] for _ in range(9)], dtype=np.int64)
    f = charpoly_int_matrix(A)
    for q in (2, 3, 10007, 32749):
        assert ModPoly(q, charpoly_mod_p(A, q)) == reduce_mod(f, q)


def test_charpoly_rejects_nonintegral():
    from fractions import Fraction

    with pytest.raises(CharpolyError):
        charpoly_int_matrix(np.array([[Fraction(1, 2)]], dtype=object))
