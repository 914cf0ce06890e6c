"""Factorization over prime fields.

Squarefree decomposition, then distinct-degree factorization driven by a
Frobenius matrix, then Cantor-Zassenhaus equal-degree splitting (trace map
in characteristic 2).  Splitting is seeded so output is reproducible.
"""

from __future__ import annotations

import numpy as np

from . import _gf
from .dense import ModPoly
from .factorization import Factorization


def _sff(f: np.ndarray, p: int) -> list[tuple[np.ndarray, int]]:
    """Squarefree decomposition of a monic f: list of (squarefree part, multiplicity)."""
    out: list[tuple[np.ndarray, int]] = []
    if f.size <= 1:
        return out
    df = _gf.derivative(f, p)
    if df.size == 0:
        # f = g(X^p); p-th root coefficient-wise (a^(1/p) = a in F_p)
        g = f[::p].copy()
        return [(h, m * p) for h, m in _sff(g, p)]
    c = _gf.gcd(f, df, p)
    w = _gf.divmod_(f, c, p)[0]
    i = 1
    while w.size > 1:
        y = _gf.gcd(w, c, p)
        fac = _gf.divmod_(w, y, p)[0]
        if fac.size > 1:
            out.append((_gf.monic(fac, p), i))
        w = y
        c = _gf.divmod_(c, y, p)[0]
        i += 1
    if c.size > 1:
        g = c[::p].copy()
        out.extend((h, m * p) for h, m in _sff(g, p))
    return out


def _ddf(f: np.ndarray, p: int) -> list[tuple[np.ndarray, int]]:
    """Distinct-degree factorization of a monic squarefree f.

    Returns (product of all irreducible factors of degree d, d) pairs.
    """
    out: list[tuple[np.ndarray, int]] = []
    n = f.size - 1
    if n <= 0:
        return out
    if n == 1:
        return [(f, 1)]
    ring = _gf.ModulusRing(f, p)
    Q = ring.frobenius_matrix()
    x = _gf.x_poly()
    h = ring.reduce(x)
    rest = f
    d = 0
    while rest.size - 1 >= 2 * (d + 1):
        d += 1
        h = ring.apply_frobenius(h, Q)
        g = _gf.gcd(rest, _gf.sub(h, x, p), p)
        if g.size > 1:
            out.append((g, d))
            rest = _gf.divmod_(rest, g, p)[0]
    if rest.size > 1:
        out.append((_gf.monic(rest, p), rest.size - 1))
    return out


def _edf(f: np.ndarray, d: int, p: int, rng: np.random.Generator) -> list[np.ndarray]:
    """Split a monic squarefree f whose irreducible factors all have degree d."""
    n = f.size - 1
    if n == d:
        return [f]
    ring = _gf.ModulusRing(f, p)
    Q = ring.frobenius_matrix() if d > 1 or p == 2 else None
    pieces = [f]
    done: list[np.ndarray] = []
    while pieces:
        a = _gf.strip(rng.integers(0, p, size=n, dtype=np.int64))
        if a.size <= 1:
            continue
        if p == 2:
            # absolute trace to F_2 of the degree-d factors' residue fields
            b = a.copy()
            t = a.copy()
            for _ in range(d - 1):
                t = ring.apply_frobenius(t, Q)
                b = _gf.add(b, t, p)
        else:
            # a^((p^d - 1)/2) = (a * a^p * ... * a^(p^(d-1)))^((p-1)/2)
            norm = a.copy()
            t = a.copy()
            for _ in range(d - 1):
                t = ring.apply_frobenius(t, Q)
                norm = ring.mul(norm, t)
            b = _gf.sub(ring.pow(norm, (p - 1) // 2), _gf.one(), p)
        nxt = []
        for g in pieces:
            s = _gf.gcd(g, _gf.rem(b, g, p), p) if b.size else g
            if 1 < s.size < g.size:
                other = _gf.monic(_gf.divmod_(g, s, p)[0], p)
                for piece in (s, other):
                    (done if piece.size - 1 == d else nxt).append(piece)
            else:
                nxt.append(g)
        pieces = nxt
    return done


def _sort_key(a: np.ndarray) -> tuple:
    return (a.size, tuple(int(c) for c in a[::-1]))


def factor_mod_p(f: ModPoly, seed: int = 0) -> Factorization:
    """Complete factorization of a nonzero polynomial over F_p."""
    if not f:
        raise ValueError("cannot factor the zero polynomial")
    p = f.modulus
    unit = f.lc
    fm = f.monic().array()
    rng = np.random.default_rng([seed, p, fm.size])
    factors: list[tuple[np.ndarray, int]] = []
    for part, mult in _sff(fm, p):
        for block, d in _ddf(part, p):
            for g in _edf(block, d, p, rng):
                factors.append((g, mult))
    factors.sort(key=lambda t: (_sort_key(t[0]), t[1]))
    return Factorization(
        base=f,
        unit=unit,
        factors=tuple((ModPoly.from_array(p, g), m) for g, m in factors),
    )


def distinct_degree_profile(f: ModPoly) -> dict[int, int]:
    """Map degree d -> number of irreducible factors of degree d (with multiplicity)."""
    if not f:
        raise ValueError("zero polynomial")
    p = f.modulus
    counts: dict[int, int] = {}
    for part, mult in _sff(f.monic().array(), p):
        for block, d in _ddf(part, p):
            counts[d] = counts.get(d, 0) + mult * ((block.size - 1) // d)
    return counts


def largest_irreducible_degree_mod_p(f: ModPoly) -> int:
    """deg*: the largest degree of an irreducible factor of f over F_p."""
    profile = distinct_degree_profile(f)
    return max(profile, default=0)


def is_squarefree_mod_p(f: ModPoly) -> bool:
    a = f.monic().array()
    if a.size <= 2:
        return a.size > 0
    return _gf.gcd(a, _gf.derivative(a, f.modulus), f.modulus).size == 1


def is_irreducible_mod_p(f: ModPoly) -> bool:
    """Irreducibility check independent of the factoring path.

    f of degree n is irreducible iff gcd(f, X^(p^k) - X) = 1 for all
    k <= n/2 and X^(p^n) = X mod f.
    """
    n = f.degree
    if n <= 0:
        return False
    if n == 1:
        return True
    p = f.modulus
    a = f.monic().array()
    ring = _gf.ModulusRing(a, p)
    x = _gf.x_poly()
    h = ring.reduce(x)
    for _ in range(1, n // 2 + 1):
        h = ring.pow(h, p)
        if _gf.gcd(a, _gf.sub(h, x, p), p).size > 1:
            return False
    for _ in range(n // 2 + 1, n + 1):
        h = ring.pow(h, p)
    return _gf.sub(h, ring.reduce(x), p).size == 0
