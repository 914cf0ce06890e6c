"""Lower bounds for the largest simple rational Hecke submodule of S_2(Gamma_0(N)).

``theorem_bound`` gives the class-group bound m for d_p(N).
``congruence_check`` and ``detected_lower_bound`` test it against modular
symbol data at p = 2.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import asdict, dataclass, field
from functools import lru_cache

from sympy import isprime

from .dihedral import RamifiedPrime, dihedral_charpoly
from .modsym import al_split, atkin_lehner, build_space, charpoly_on, check_product, hecke_operator
from .modsym.space import DEFAULT_SIZE_CAP, is_squarefree
from .poly import (
    IntPoly,
    factor_mod_p,
    largest_irreducible_degree_mod_p,
    poly_divides_mod_p,
    reduce_mod,
)
from .quadforms import ClassGroup, group_structure, kronecker, order_in_unit_quotient, prime_form

# refusal codes, one per hypothesis
NOT_SQUAREFREE = "N_NOT_SQUAREFREE"
NOT_3_MOD_4 = "N_NOT_3_MOD_4"
P_NOT_PRIME = "P_NOT_PRIME"
P_DIVIDES_N = "P_DIVIDES_N"
P_DIVIDES_R = "NO_QUOTIENT_PRIME_TO_P"
M_TOO_SMALL = "M_AT_MOST_2"
NOT_PRIME_7_MOD_8 = "N_NOT_PRIME_7_MOD_8"
ELL_DIVIDES_N = "ELL_DIVIDES_N"
P_NOT_2 = "P_NOT_2"
R_TOO_SMALL = "R_AT_MOST_2"


class HypothesisRefusal(ValueError):
    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code


@dataclass
class Candidate:
    r: int
    m: int


@dataclass
class LogLogBound:
    N: int
    applicable: bool
    value: float | None = None
    ceiling: int | None = None
    vacuous: bool = False
    class_number_odd: bool | None = None
    two_splits: bool | None = None
    order_of_prime_above_2: int | None = None
    order_bound: float | None = None
    chain_holds: bool | None = None


@dataclass
class BoundReport:
    N: int
    p: int
    hypotheses: dict[str, bool]
    refusals: list[str]
    class_group: ClassGroup | None = None
    r: int | None = None
    m: int | None = None
    candidates: list[Candidate] = field(default_factory=list)
    theorem: int | None = None
    cor13: float | None = None
    cor14: LogLogBound | None = None

    @property
    def refused(self) -> bool:
        return self.theorem is None

    def to_dict(self) -> dict:
        cg = self.class_group.to_dict() if self.class_group else None
        return {
            "N": self.N,
            "p": self.p,
            "hypotheses": dict(self.hypotheses),
            "refusals": list(self.refusals),
            "class_group": cg,
            "r": self.r,
            "m": self.m,
            "candidates": [asdict(c) for c in self.candidates],
            "bounds": {
                "theorem": self.theorem,
                "cor13": self.cor13,
                "cor14": asdict(self.cor14) if self.cor14 else None,
            },
        }


def _admissible(G: ClassGroup, p: int) -> list[Candidate]:
    return [Candidate(r, order_in_unit_quotient(p, r)) for r in G.cyclic_quotient_orders() if r % p]


def theorem_bound(N: int, p: int) -> BoundReport:
    """The bound d_p(N) >= m from a cyclic quotient of order r of Cl(Q(sqrt(-N)))."""
    hyp = {
        "N_squarefree": is_squarefree(N),
        "N_3_mod_4": N % 4 == 3,
        "p_prime": isprime(p),
        "p_not_dividing_N": N % p != 0,
    }
    refusals = []
    if not hyp["N_squarefree"]:
        refusals.append(NOT_SQUAREFREE)
    if not hyp["N_3_mod_4"]:
        refusals.append(NOT_3_MOD_4)
    if not hyp["p_prime"]:
        refusals.append(P_NOT_PRIME)
    if not hyp["p_not_dividing_N"]:
        refusals.append(P_DIVIDES_N)
    report = BoundReport(N, p, hyp, refusals)
    if refusals:
        return report
    G = group_structure(-N)
    report.class_group = G
    cands = _admissible(G, p)
    report.candidates = cands
    hyp["p_not_dividing_r"] = any(c.r > 1 for c in cands)
    if not hyp["p_not_dividing_r"]:
        refusals.append(P_DIVIDES_R)
    best = max(cands, key=lambda c: (c.m, c.r))
    report.r, report.m = best.r, best.m
    hyp["m_gt_2"] = best.m > 2
    if not hyp["m_gt_2"] and P_DIVIDES_R not in refusals:
        refusals.append(M_TOO_SMALL)
    if not refusals:
        report.theorem = best.m
    if p == 2 and best.r >= 3:
        report.cor13 = math.log2(best.r - 1)
    if N % 8 == 7 and isprime(N):
        report.cor14 = cor_loglog(N, G)
    return report


def cor_loglog(N: int, G: ClassGroup | None = None) -> LogLogBound:
    """log2 log2 (N/8) for prime N = 7 mod 8, with the chain of facts behind it."""
    if not (isprime(N) and N % 8 == 7):
        raise HypothesisRefusal(NOT_PRIME_7_MOD_8, f"{N} is not a prime congruent to 7 mod 8")
    out = LogLogBound(N, applicable=True)
    inner = math.log2(N / 8)
    if inner > 0:
        out.value = math.log2(inner)
        out.ceiling = math.ceil(out.value)
    # a bound of 1 or less says nothing: every nonzero module has a simple piece
    out.vacuous = out.ceiling is None or out.ceiling <= 1
    if G is None:
        G = group_structure(-N)
    out.class_number_odd = G.h % 2 == 1
    out.two_splits = kronecker(-N, 2) == 1
    if out.two_splits:
        from .quadforms import order_from_multiple

        out.order_of_prime_above_2 = order_from_multiple(prime_form(-N, 2), G.h)
    out.order_bound = math.log2(N / 4)
    out.chain_holds = bool(
        out.class_number_odd
        and out.two_splits
        and out.order_of_prime_above_2 is not None
        and out.order_of_prime_above_2 >= out.order_bound
    )
    return out


# --- direct verification with modular symbols ---


@lru_cache(maxsize=32)
def hecke_charpolys(N: int, ell: int, size_cap: int = DEFAULT_SIZE_CAP) -> tuple[IntPoly, IntPoly]:
    """(Phi^+, Phi^-) for T_ell on S_2(Gamma_0(N)), checked against the full space."""
    space = build_space(N, size_cap=size_cap)
    T = hecke_operator(space, ell)
    split = al_split(space, atkin_lehner(space))
    plus = charpoly_on(space, T, "plus", split)
    minus = charpoly_on(space, T, "minus", split)
    if not check_product(space, T, plus, minus):
        raise ArithmeticError("Phi^+ Phi^- does not match the full characteristic polynomial")
    return plus, minus


# (N, ell, size_cap) -> (Phi^+, Phi^-); the CLI swaps in a cached version
CharpolySource = Callable[[int, int, int], tuple[IntPoly, IntPoly]]


@dataclass
class FactorCheck:
    factor: str
    degree: int
    divides: bool
    sides: list[str]


@dataclass
class CongruenceResult:
    N: int
    ell: int
    applicable: bool
    r: int | None = None
    m: int | None = None
    dihedral_charpoly: str | None = None
    factors: list[FactorCheck] = field(default_factory=list)
    passed: bool | None = None
    reason: str | None = None

    @property
    def theorem_backed(self) -> bool:
        """The weight-raising congruence preserves a_ell only for ell != p = 2."""
        return self.ell != 2

    def to_dict(self) -> dict:
        return {
            "checked": self.applicable,
            "pass": self.passed,
            "theorem_backed": self.theorem_backed,
            "N": self.N,
            "ell": self.ell,
            "r": self.r,
            "m": self.m,
            "dihedral_charpoly": self.dihedral_charpoly,
            "factors": [asdict(f) for f in self.factors],
            "reason": self.reason,
        }


def _pipeline_checks(N: int, ell: int) -> None:
    if not is_squarefree(N):
        raise HypothesisRefusal(NOT_SQUAREFREE, f"{N} is not squarefree")
    if N % 4 != 3:
        raise HypothesisRefusal(NOT_3_MOD_4, f"{N} is not 3 mod 4")
    if N % ell == 0:
        raise HypothesisRefusal(ELL_DIVIDES_N, f"{ell} divides {N}")


def congruence_check(
    N: int,
    ell: int,
    size_cap: int = DEFAULT_SIZE_CAP,
    source: CharpolySource = hecke_charpolys,
) -> CongruenceResult:
    """Does every irreducible factor of the mod-2 dihedral characteristic
    polynomial of T_ell divide Phi_{N,ell} mod 2?"""
    _pipeline_checks(N, ell)
    report = theorem_bound(N, 2)
    r = report.r
    result = CongruenceResult(N, ell, applicable=False, r=r, m=report.m)
    if r is None or r < 3:
        result.reason = R_TOO_SMALL
        return result
    try:
        dpoly = dihedral_charpoly(N, r, ell)
    except RamifiedPrime as exc:
        raise HypothesisRefusal(ELL_DIVIDES_N, str(exc)) from exc
    result.applicable = True
    result.dihedral_charpoly = str(dpoly)
    plus, minus = source(N, ell, size_cap)
    sides = {"plus": reduce_mod(plus, 2), "minus": reduce_mod(minus, 2)}
    full = sides["plus"] * sides["minus"]
    for g, _ in factor_mod_p(reduce_mod(dpoly, 2)).factors:
        hit = [name for name, f in sides.items() if poly_divides_mod_p(g, f)]
        result.factors.append(FactorCheck(str(g), g.degree, poly_divides_mod_p(g, full), hit))
    result.passed = all(f.divides for f in result.factors)
    return result


@dataclass
class DetectedBound:
    N: int
    ell: int
    p: int
    degstar: int
    degstar_plus: int
    degstar_minus: int
    certified: bool
    predicted_m: int | None

    def to_dict(self) -> dict:
        return asdict(self)


def detected_lower_bound(
    N: int,
    ell: int,
    p: int = 2,
    size_cap: int = DEFAULT_SIZE_CAP,
    source: CharpolySource = hecke_charpolys,
) -> DetectedBound:
    """deg* of Phi_{N,ell} mod p, a lower bound for d_2(N).

    An irreducible rational factor of degree k reduces to factors of degree
    at most k, so every mod-p factor degree is bounded by the dimension of a
    simple rational Hecke submodule.
    """
    if p != 2:
        raise HypothesisRefusal(P_NOT_2, "direct detection uses the weight-2 space, so p must be 2")
    if N % ell == 0:
        raise HypothesisRefusal(ELL_DIVIDES_N, f"{ell} divides {N}")
    plus, minus = source(N, ell, size_cap)
    dp = largest_irreducible_degree_mod_p(reduce_mod(plus, p)) if plus.degree > 0 else 0
    dm = largest_irreducible_degree_mod_p(reduce_mod(minus, p)) if minus.degree > 0 else 0
    predicted = None
    if is_squarefree(N) and N % 4 == 3:
        predicted = theorem_bound(N, p).theorem
    return DetectedBound(N, ell, p, max(dp, dm), dp, dm, True, predicted)
