"""Hecke operators, the Atkin-Lehner involution and eigenspace characteristic polynomials."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from ..poly import IntPoly
from ..poly.charpoly import CharpolyError, _crt_lists, charpoly_mod_p, root_coefficient_bound, word_primes
from .space import LevelError, ModSymSpace, RationalMatrix, is_squarefree

Selector = Literal["full", "plus", "minus"]

# The involution returned by atkin_lehner is minus the geometric action of
# W_N = [[0, -1], [N, 0]] on modular symbols, so its +1 eigenspace holds the
# newforms with root number +1 (the larger side for prime N).
AL_ORIENTATION = -1


@dataclass(frozen=True)
class HeckeMatrix:
    """Exact operator on the cuspidal basis of a space (row-vector convention)."""

    label: str
    level: int
    matrix: RationalMatrix
    root_bound: float | None = None
    orientation: int = 1

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    def commutes_with(self, other: HeckeMatrix) -> bool:
        return (self.matrix @ other.matrix) == (other.matrix @ self.matrix)

    def row_sum_bound(self) -> float:
        """Max absolute row sum, a bound on every eigenvalue."""
        if self.dimension == 0:
            return 0.0
        s = max(sum(abs(int(x)) for x in row) for row in self.matrix.num)
        return s / self.matrix.den


def hecke_operator(space: ModSymSpace, ell: int) -> HeckeMatrix:
    """T_ell on the cuspidal subspace, for a prime ell not dividing the level."""
    if space.N % ell == 0:
        raise LevelError(f"T_{ell} with {ell} | {space.N} is outside the anemic Hecke algebra")
    key = ("T", ell)
    if key not in space._hecke_cache:
        A = space.ambient_hecke(ell)
        M = space.restrict_to_cuspidal(A)
        space._hecke_cache[key] = HeckeMatrix(f"T_{ell}", space.N, M, root_bound=2 * math.sqrt(ell))
    return space._hecke_cache[key]


def atkin_lehner(space: ModSymSpace) -> HeckeMatrix:
    """The involution w_N on the cuspidal subspace (orientation AL_ORIENTATION)."""
    if not is_squarefree(space.N):
        raise LevelError(f"level {space.N} is not squarefree")
    key = ("W",)
    if key not in space._hecke_cache:
        A = space.ambient_atkin_lehner()
        M = space.restrict_to_cuspidal(A)
        M = RationalMatrix(M.num * AL_ORIENTATION, M.den)
        if not (M @ M).is_identity():
            raise ArithmeticError("w_N does not square to the identity")
        space._hecke_cache[key] = HeckeMatrix("w_N", space.N, M, root_bound=1.0, orientation=AL_ORIENTATION)
    return space._hecke_cache[key]


def rref_mod(A: np.ndarray, q: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over F_q: (nonzero rows, pivot columns)."""
    A = np.array(A, dtype=np.int64) % q
    rows, cols = A.shape
    piv: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(A[r:, c])
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            A[[r, k]] = A[[k, r]]
        A[r, c:] = A[r, c:] * pow(int(A[r, c]), -1, q) % q
        col = A[:, c].copy()
        col[r] = 0
        hit = np.flatnonzero(col)
        if hit.size:
            A[hit, c:] = (A[hit, c:] - np.outer(col[hit], A[r, c:]) % q) % q
        piv.append(c)
        r += 1
    return A[:r], piv


def _rank_mod(A: np.ndarray, q: int) -> int:
    return len(rref_mod(A, q)[1])


@dataclass(frozen=True)
class EigenSplit:
    """Bases (as rows in cuspidal coordinates) of the +1 and -1 eigenspaces of w."""

    plus: RationalMatrix
    minus: RationalMatrix

    @property
    def dims(self) -> tuple[int, int]:
        return self.plus.shape[0], self.minus.shape[0]


def _independent_rows(M: RationalMatrix, q: int) -> list[int]:
    _, piv = rref_mod(M.mod(q).T, q)
    return piv


def al_split(space: ModSymSpace, w: HeckeMatrix | None = None) -> EigenSplit:
    """Exact bases of the two eigenspaces of an involution w.

    The +1 space is the row space of 1 + w and the -1 space that of 1 - w.
    Ranks are read modulo a word-size prime; they are exact once they sum to
    the full dimension, because reduction can only lower a rank.
    """
    if w is None:
        w = atkin_lehner(space)
    n = w.dimension
    I = np.eye(n, dtype=object) * w.matrix.den
    num = w.matrix.num.astype(object)
    P = RationalMatrix(I + num, w.matrix.den)
    Mn = RationalMatrix(I - num, w.matrix.den)
    for q in word_primes(avoid=w.matrix.den):
        rp = _independent_rows(P, q)
        rm = _independent_rows(Mn, q)
        if len(rp) + len(rm) == n:
            break
    plus = (
        RationalMatrix(_small(P.num[rp]), P.den) if rp else RationalMatrix(np.zeros((0, n), dtype=np.int64))
    )
    minus = (
        RationalMatrix(_small(Mn.num[rm]), Mn.den) if rm else RationalMatrix(np.zeros((0, n), dtype=np.int64))
    )
    return EigenSplit(plus, minus)


def _small(a: np.ndarray) -> np.ndarray:
    if a.size == 0 or max(abs(int(x)) for x in a.ravel()) < 2**62:
        return a.astype(np.int64)
    return a


def _restricted_charpoly_mod(
    T: RationalMatrix, U: RationalMatrix | None, q: int, d: int
) -> np.ndarray | None:
    Tq = T.mod(q)
    if U is None:
        return charpoly_mod_p(Tq, q)
    R, piv = rref_mod(U.mod(q), q)
    if len(piv) != d:
        return None
    Y = (R @ Tq % q)[:, piv]
    return charpoly_mod_p(Y, q)


def charpoly_on(
    space: ModSymSpace,
    op: HeckeMatrix,
    selector: Selector = "full",
    split: EigenSplit | None = None,
) -> IntPoly:
    """Integer characteristic polynomial of op on the cuspidal space or one eigenspace.

    For an eigenspace, the operator is restricted modulo each prime to the
    reduction of an exact basis, and the results are combined by CRT
    against a bound from the eigenvalue bound of op.  One extra prime
    checks the reconstruction.
    """
    if selector == "full":
        U, d = None, op.dimension
    else:
        if split is None:
            split = al_split(space)
        U = split.plus if selector == "plus" else split.minus
        d = U.shape[0]
    if d == 0:
        return IntPoly((1,))
    R = op.row_sum_bound()
    if op.root_bound is not None:
        R = min(R, op.root_bound)
    bound = root_coefficient_bound(d, R)
    avoid = op.matrix.den * (U.den if U is not None else 1)
    residues, primes = [], []
    product = 1
    for q in word_primes(avoid=avoid):
        cp = _restricted_charpoly_mod(op.matrix, U, q, d)
        if cp is None:
            continue
        residues.append(cp)
        primes.append(q)
        product *= q
        if product > 2 * bound * q:
            break
    coeffs, _ = _crt_lists(residues[:-1], primes[:-1])
    qc = primes[-1]
    if any((c - int(r)) % qc for c, r in zip(coeffs, residues[-1])):
        raise CharpolyError("safety prime disagrees with the reconstructed characteristic polynomial")
    return IntPoly(coeffs)


def check_product(
    space: ModSymSpace, op: HeckeMatrix, plus: IntPoly, minus: IntPoly, n_primes: int = 2
) -> bool:
    """Check Phi = Phi^+ Phi^- modulo a few primes."""
    prod = plus * minus
    if prod.degree != op.dimension:
        return False
    for q, _ in zip(word_primes(avoid=op.matrix.den), range(n_primes)):
        cp = charpoly_mod_p(op.matrix.mod(q), q)
        if any((int(a) - b) % q for a, b in zip(cp, prod.coeffs)):
            return False
    return True
