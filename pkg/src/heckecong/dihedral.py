"""Dihedral eigenvalue systems coming from ring class characters of Q(sqrt(-N)).

Eigenvalues stay symbolic: a_ell = z^(j e) + z^(-j e) with z a primitive r-th
root of unity is recorded as the exponent e, and integer polynomials are
built only from the minimal polynomials psi_d of z_d + 1/z_d.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cache, lru_cache

from sympy import isprime, totient

from .poly import IntPoly
from .quadforms import (
    ClassGroup,
    InertPrime,
    QuadForm,
    group_structure,
    kronecker,
    prime_form,
)


class RamifiedPrime(ValueError):
    pass


class SearchExhausted(RuntimeError):
    pass


@cache
def cyclotomic(n: int) -> IntPoly:
    """Phi_n by exact division of X^n - 1 by Phi_d for the proper divisors d."""
    if n < 1:
        raise ValueError("n must be positive")
    f = IntPoly.x() ** n - IntPoly.constant(1)
    for d in range(1, n):
        if n % d == 0:
            f = f.divmod_exact(cyclotomic(d))[0]
    return f


@cache
def half_cyclotomic(r: int) -> IntPoly:
    """psi_r, the minimal polynomial of z_r + 1/z_r, for r >= 3."""
    if r < 3:
        raise ValueError(f"half_cyclotomic needs r >= 3, got {r}")
    phi = cyclotomic(r).coeffs
    n = (len(phi) - 1) // 2
    # X^k + X^-k = D_k(X + 1/X), with D_0 = 2, D_1 = Y, D_k = Y D_{k-1} - D_{k-2}
    y = IntPoly.x()
    d_prev, d_cur = IntPoly.constant(2), y
    psi = IntPoly.constant(phi[n])
    for k in range(1, n + 1):
        psi = psi + IntPoly.constant(phi[n + k]) * d_cur
        d_prev, d_cur = d_cur, y * d_cur - d_prev
    return psi


def _psi(d: int) -> IntPoly:
    # d = 1 is the trivial character: eigenvalue 1 + 1 = 2
    if d == 1:
        return IntPoly((-2, 1))
    if d == 2:
        return IntPoly((2, 1))
    return half_cyclotomic(d)


def check_level(N: int) -> None:
    if N < 3 or N % 4 != 3:
        raise ValueError(f"level must satisfy N = 3 mod 4, got {N}")


@dataclass(frozen=True)
class DihedralSystem:
    """The character sending ``generator`` to z_r^j on a cyclic quotient of order r."""

    N: int
    r: int
    generator: QuadForm
    j: int = 1

    def __post_init__(self):
        if self.r < 3 or self.r % 2 == 0:
            raise ValueError(f"r must be odd and > 2, got {self.r}")
        if not 1 <= self.j <= self.r // 2:
            raise ValueError(f"j must lie in [1, {self.r // 2}]")

    def group(self) -> ClassGroup:
        return _group(-self.N)

    def quotient_coordinate(self, f: QuadForm) -> int:
        """Image of the class of f in Z/r under the projection onto the last factor."""
        G = self.group()
        if G.exponent % self.r:
            raise ValueError(f"{self.r} is not the order of a cyclic quotient of Cl({-self.N})")
        return G.coordinates(f)[-1] % self.r

    @classmethod
    def standard(cls, N: int, r: int, j: int = 1) -> DihedralSystem:
        G = _group(-N)
        if r < 3 or G.exponent % r:
            raise ValueError(f"Cl({-N}) has no cyclic quotient of order {r}")
        return cls(N, r, G.generators[-1], j)


@lru_cache(maxsize=256)
def _group(D: int) -> ClassGroup:
    return group_structure(D)


def eigenvalue_exponent(system: DihedralSystem, ell: int) -> int:
    """e with Frob_ell mapping to generator^e in the cyclic quotient."""
    N, r = system.N, system.r
    if N % ell == 0:
        raise RamifiedPrime(f"{ell} divides the level {N}")
    if kronecker(-N, ell) == -1:
        raise InertPrime(f"{ell} is inert in Q(sqrt({-N})): a_{ell} = 0")
    g = system.quotient_coordinate(system.generator)
    if math.gcd(g, r) != 1:
        raise ValueError("generator does not generate the quotient")
    x = system.quotient_coordinate(prime_form(-N, ell))
    return x * pow(g, -1, r) % r


def exponent_charpoly(r: int, e: int) -> IntPoly:
    """prod_{j=1}^{(r-1)/2} (X - z^(je) - z^(-je)) assembled from psi_d factors."""
    counts: dict[int, int] = {}
    for j in range(1, r // 2 + 1):
        d = r // math.gcd(j * e, r)
        counts[d] = counts.get(d, 0) + 1
    out = IntPoly.constant(1)
    for d in sorted(counts):
        width = 1 if d <= 2 else int(totient(d)) // 2
        m, rem = divmod(counts[d], width)
        if rem:
            raise ArithmeticError(f"orbit count {counts[d]} not divisible by {width}")
        out = out * _psi(d) ** m
    return out


def dihedral_charpoly(N: int, r: int, ell: int, system: DihedralSystem | None = None) -> IntPoly:
    """Characteristic polynomial of T_ell on the span of the (r-1)/2 dihedral forms."""
    if system is None:
        system = DihedralSystem.standard(N, r)
    try:
        e = eigenvalue_exponent(system, ell)
    except InertPrime:
        return IntPoly.x() ** (r // 2)
    return exponent_charpoly(r, e)


def find_l0(N: int, r: int, p: int | None = None, bound: int = 10**5) -> int:
    """Smallest split prime ell (not dividing N, nor p if given) whose Frobenius
    generates the cyclic quotient of order r."""
    if r < 3:
        raise ValueError("no nontrivial cyclic quotient")
    system = DihedralSystem.standard(N, r)
    for ell in range(2, bound + 1):
        if not isprime(ell) or N % ell == 0 or (p is not None and ell == p):
            continue
        if kronecker(-N, ell) == -1:
            continue
        if math.gcd(eigenvalue_exponent(system, ell), r) == 1:
            return ell
    raise SearchExhausted(f"no suitable prime below {bound}")
