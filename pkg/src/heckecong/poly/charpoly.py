"""Exact characteristic polynomials by multi-modular Hessenberg reduction."""

from __future__ import annotations

import math
from collections.abc import Iterator, Sequence
from fractions import Fraction

import numpy as np
from sympy import prevprime

from .dense import IntPoly

# Matrix-vector products over n <= 4096 stay below 2**63 for p < 2**25.
WORD_BOUND = 2**25


class CharpolyError(ArithmeticError):
    """Multi-modular reconstruction disagreed with the safety prime."""


def word_primes(start: int = WORD_BOUND, avoid: int = 1) -> Iterator[int]:
    """Primes below ``start`` in descending order, skipping divisors of ``avoid``."""
    q = start
    while True:
        q = prevprime(q)
        if avoid % q:
            yield q


def charpoly_mod_p(A: np.ndarray, p: int) -> np.ndarray:
    """Characteristic polynomial of a square int64 matrix over F_p.

    Returns ascending coefficients (length n + 1, monic).
    """
    H = np.array(A, dtype=np.int64) % p
    n = H.shape[0]
    for j in range(n - 2):
        col = H[j + 1 :, j]
        nz = np.flatnonzero(col)
        if nz.size == 0:
            continue
        i = j + 1 + int(nz[0])
        if i != j + 1:
            H[[i, j + 1], :] = H[[j + 1, i], :]
            H[:, [i, j + 1]] = H[:, [j + 1, i]]
        if j + 2 >= n:
            continue
        inv = pow(int(H[j + 1, j]), -1, p)
        u = (H[j + 2 :, j] * inv) % p
        if not u.any():
            continue
        H[j + 2 :, :] = (H[j + 2 :, :] - np.outer(u, H[j + 1, :]) % p) % p
        H[:, j + 1] = (H[:, j + 1] + (H[:, j + 2 :] @ u) % p) % p
    # charpoly of an upper Hessenberg matrix by the standard recurrence
    P = np.zeros((n + 1, n + 1), dtype=np.int64)
    P[0, 0] = 1
    for k in range(1, n + 1):
        prev = P[k - 1]
        cur = np.zeros(n + 1, dtype=np.int64)
        cur[1:] = prev[:-1]
        cur = (cur - int(H[k - 1, k - 1]) * prev) % p
        # subtract sum_{i<k} h[i-1,k-1] * prod_{m=i..k-1} h[m, m-1] * P[i-1]
        t = np.zeros(k - 1, dtype=np.int64)
        prod = 1
        for i in range(k - 1, 0, -1):
            prod = prod * int(H[i, i - 1]) % p
            if prod == 0:
                break
            t[i - 1] = int(H[i - 1, k - 1]) * prod % p
        if k > 1 and t.any():
            cur = (cur - (t @ P[: k - 1]) % p) % p
        P[k] = cur
    return P[n]


def _as_fraction_rows(M: Sequence[Sequence]) -> tuple[list[list[int]], int]:
    den = 1
    rows = [[Fraction(x) for x in row] for row in M]
    for row in rows:
        for x in row:
            den = den * x.denominator // math.gcd(den, x.denominator)
    return [[int(x * den) for x in row] for row in rows], den


def hadamard_coefficient_bound(n: int, entry_bound: Fraction | int) -> int:
    """max_k C(n,k) * k^(k/2) * B^k, bounding every charpoly coefficient."""
    B = Fraction(entry_bound)
    best = 1
    for k in range(1, n + 1):
        best = max(best, math.ceil(math.comb(n, k) * (math.isqrt(k**k) + 1) * B**k))
    return best


def root_coefficient_bound(n: int, root_bound: float) -> int:
    """max_k C(n,k) R^k when every eigenvalue has absolute value <= R."""
    R = Fraction(root_bound).limit_denominator(10**6) + Fraction(1, 10**6)
    return max(math.ceil(math.comb(n, k) * R**k) for k in range(n + 1))


def _crt_lists(residues: list[np.ndarray], primes: list[int]) -> tuple[list[int], int]:
    acc = [int(c) for c in residues[0]]
    M = primes[0]
    for r, q in zip(residues[1:], primes[1:]):
        inv = pow(M, -1, q)
        acc = [a + M * (((int(b) - a) * inv) % q) for a, b in zip(acc, r)]
        M *= q
    half = M // 2
    return [a - M if a > half else a for a in acc], M


def charpoly_int_matrix(
    M: Sequence[Sequence] | np.ndarray,
    root_bound: float | None = None,
) -> IntPoly:
    """Exact integer characteristic polynomial of a rational matrix.

    The matrix must have an integral characteristic polynomial.  Primes are
    taken descending from ``WORD_BOUND`` until their product exceeds twice
    the coefficient bound, and one further prime checks the result.  When a
    bound on the absolute values of the eigenvalues is known, passing it as
    ``root_bound`` shrinks the number of primes needed.
    """
    if isinstance(M, np.ndarray) and M.dtype != object:
        rows = M.astype(np.int64).tolist()
        den = 1
    else:
        rows, den = _as_fraction_rows(M)
    n = len(rows)
    if n == 0:
        return IntPoly((1,))
    if any(len(r) != n for r in rows):
        raise ValueError("matrix must be square")
    if root_bound is not None:
        bound = root_coefficient_bound(n, root_bound)
    else:
        emax = max((abs(x) for r in rows for x in r), default=0)
        bound = hadamard_coefficient_bound(n, Fraction(emax, den))
    big = np.array(rows, dtype=object)
    residues: list[np.ndarray] = []
    primes: list[int] = []
    product = 1
    for q in word_primes(avoid=den):
        Aq = (big % q).astype(np.int64)
        if den != 1:
            Aq = (Aq * pow(den, -1, q)) % q
        residues.append(charpoly_mod_p(Aq, q))
        primes.append(q)
        product *= q
        if product > 2 * bound * primes[-1]:
            break
    coeffs, _ = _crt_lists(residues[:-1], primes[:-1])
    check_q = primes[-1]
    if any((c - int(r)) % check_q for c, r in zip(coeffs, residues[-1])):
        raise CharpolyError("characteristic polynomial is not integral (safety prime disagrees)")
    return IntPoly(coeffs)
