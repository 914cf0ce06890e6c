import math

import pytest
from sympy import isprime, primerange

from heckecong import bounds
from heckecong.bounds import (
    HypothesisRefusal,
    congruence_check,
    cor_loglog,
    detected_lower_bound,
    theorem_bound,
)
from heckecong.dihedral import find_l0
from heckecong.modsym.space import is_squarefree


def _levels(limit: int):
    return [N for N in range(3, limit + 1) if N % 4 == 3 and is_squarefree(N)]


# --- the class-group bound ---


def test_theorem_bound_719():
    rep = theorem_bound(719, 2)
    assert (rep.r, rep.m, rep.theorem) == (31, 5, 5)
    assert rep.class_group.h == 31
    assert not rep.refused


def test_theorem_bound_table_row():
    rep = theorem_bound(81839, 2)
    assert (rep.r, rep.m, rep.theorem) == (377, 42, 42)


def test_small_m_is_refused():
    rep = theorem_bound(23, 2)
    assert (rep.r, rep.m) == (3, 1)
    assert rep.theorem is None
    assert rep.refusals == [bounds.M_TOO_SMALL]


@pytest.mark.parametrize(
    "N, p, codes",
    [
        (20, 2, [bounds.NOT_SQUAREFREE, bounds.NOT_3_MOD_4, bounds.P_DIVIDES_N]),
        (20, 3, [bounds.NOT_SQUAREFREE, bounds.NOT_3_MOD_4]),
        (75, 2, [bounds.NOT_SQUAREFREE]),
        (21, 2, [bounds.NOT_3_MOD_4]),
        (719, 4, [bounds.P_NOT_PRIME]),
        (719, 719, [bounds.P_DIVIDES_N]),
        (23, 3, [bounds.P_DIVIDES_R]),
        (23, 2, [bounds.M_TOO_SMALL]),
    ],
)
def test_each_hypothesis_has_its_own_refusal(N, p, codes):
    rep = theorem_bound(N, p)
    assert rep.refusals == codes
    assert rep.refused


def test_refusal_codes_are_distinct():
    codes = [
        bounds.NOT_SQUAREFREE,
        bounds.NOT_3_MOD_4,
        bounds.P_NOT_PRIME,
        bounds.P_DIVIDES_N,
        bounds.P_DIVIDES_R,
        bounds.M_TOO_SMALL,
    ]
    assert len(set(codes)) == len(codes)


@pytest.mark.parametrize("N", _levels(3000)[::5])
def test_cor13_consistency(N):
    rep = theorem_bound(N, 2)
    if rep.r is None or rep.r < 3:
        return
    # 2^m = +-1 mod r forces 2^m + 1 >= r
    assert rep.m >= math.log2(rep.r - 1)
    assert rep.cor13 <= rep.m + 1


def test_odd_p_uses_order_mod_r():
    rep = theorem_bound(719, 3)
    assert rep.r == 31 and rep.m == 15  # 3 is a primitive root mod 31


# --- the log log corollary ---


def test_loglog_719():
    out = cor_loglog(719)
    assert out.chain_holds and out.class_number_odd and out.two_splits
    assert out.order_of_prime_above_2 == 31
    assert out.ceiling == 3 and not out.vacuous


def test_loglog_23_is_vacuous():
    out = cor_loglog(23)
    assert out.ceiling == 1 and out.vacuous
    assert out.chain_holds


def test_loglog_refuses_other_levels():
    with pytest.raises(HypothesisRefusal):
        cor_loglog(733)
    with pytest.raises(HypothesisRefusal):
        cor_loglog(15)


@pytest.mark.parametrize("N", [p for p in primerange(7, 5000) if p % 8 == 7][::9])
def test_loglog_chain(N):
    out = cor_loglog(N)
    assert out.chain_holds


# --- checks against modular symbols ---


def test_congruence_719():
    res = congruence_check(719, 2)
    assert res.applicable and res.passed
    assert [f.degree for f in res.factors] == [5, 5, 5]
    by_factor = {f.factor: f.sides for f in res.factors}
    assert by_factor["X^5 + X^2 + 1"] == ["plus", "minus"]
    assert by_factor["X^5 + X^3 + 1"] == ["plus"]
    assert by_factor["X^5 + X^4 + X^3 + X^2 + 1"] == ["plus"]


def test_congruence_23():
    # Phi_{23,2} = X^2 + X - 1 is irreducible mod 2, so X + 1 cannot divide it;
    # at ell = p the weight-raised form need not keep the weight-one a_2
    res = congruence_check(23, 2)
    assert res.dihedral_charpoly == "X + 1"
    assert not res.passed and not res.theorem_backed
    for ell in (3, 13):
        res = congruence_check(23, ell)
        assert res.dihedral_charpoly == "X + 1" and res.passed and res.theorem_backed
    for ell in (5, 7, 11):
        assert congruence_check(23, ell).passed


def test_congruence_not_applicable_without_quotient():
    res = congruence_check(7, 3)
    assert not res.applicable and res.reason == bounds.R_TOO_SMALL
    assert res.to_dict()["checked"] is False


def test_congruence_refuses_bad_levels():
    with pytest.raises(HypothesisRefusal):
        congruence_check(45, 2)
    with pytest.raises(HypothesisRefusal):
        congruence_check(719 * 3, 3)


def test_detected_bounds():
    d = detected_lower_bound(719, 2)
    assert d.degstar >= 5 and d.predicted_m == 5
    assert detected_lower_bound(11, 2).degstar == 1
    with pytest.raises(HypothesisRefusal):
        detected_lower_bound(719, 2, p=3)


@pytest.mark.parametrize("N", [N for N in _levels(300) if (theorem_bound(N, 2).m or 0) > 2])
def test_bound_is_detected_with_a_generating_prime(N):
    rep = theorem_bound(N, 2)
    ell = find_l0(N, rep.r, p=2)
    res = congruence_check(N, ell)
    assert res.passed
    assert detected_lower_bound(N, ell).degstar >= rep.m
    assert isprime(ell)
