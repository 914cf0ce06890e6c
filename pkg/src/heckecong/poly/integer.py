"""Factorization of integer polynomials.

Small degrees get a full Zassenhaus factorization (Hensel lifting plus
subset recombination).  Above ``degree_cap`` only factors of degree at
most ``small_degree`` are split off; the cofactor is then either certified
irreducible from mod-q factorization patterns or flagged unresolved.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from itertools import combinations

import numpy as np
from sympy import primerange

from . import _gf
from .dense import IntPoly, ModPoly, reduce_mod
from .factorization import Factorization
from .finite_field import _ddf, _edf

DEFAULT_DEGREE_CAP = 64
DEFAULT_SMALL_DEGREE = 4
DEFAULT_CERT_PRIMES = 25

_PRIME_POOL = list(primerange(2, 2000))


# --- polynomial helpers on plain int lists modulo m (m need not be prime) ---


def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a: Iterable[int], m: int) -> list[int]:
    return _trim([c % m for c in a])


def _pmul(a: Sequence[int], b: Sequence[int], m: int) -> list[int]:
    if not a or not b:
        return []
    if len(a) < len(b):
        a, b = b, a
    out = [0] * (len(a) + len(b) - 1)
    for j, bj in enumerate(b):
        if bj:
            for i, ai in enumerate(a):
                out[i + j] += ai * bj
    return _pmod(out, m)


def _padd(a: Sequence[int], b: Sequence[int], m: int) -> list[int]:
    n = max(len(a), len(b))
    return _pmod(((a[k] if k < len(a) else 0) + (b[k] if k < len(b) else 0) for k in range(n)), m)


def _psub(a: Sequence[int], b: Sequence[int], m: int) -> list[int]:
    n = max(len(a), len(b))
    return _pmod(((a[k] if k < len(a) else 0) - (b[k] if k < len(b) else 0) for k in range(n)), m)


def _pdivmod_monic(a: Sequence[int], b: Sequence[int], m: int) -> tuple[list[int], list[int]]:
    """Division by a monic b over Z/m."""
    r = list(a)
    db = len(b) - 1
    if len(r) - 1 < db:
        return [], _pmod(r, m)
    q = [0] * (len(r) - db)
    for i in range(len(r) - 1 - db, -1, -1):
        c = r[i + db] % m
        if c:
            q[i] = c
            for j in range(db + 1):
                r[i + j] -= c * b[j]
    return _pmod(q, m), _pmod(r[:db], m)


def _pscale(a: Sequence[int], c: int, m: int) -> list[int]:
    return _pmod((x * c for x in a), m)


def _pmonic(a: Sequence[int], m: int) -> list[int]:
    inv = pow(a[-1], -1, m)
    return _pscale(a, inv, m)


def _xgcd_prime(a: list[int], b: list[int], q: int) -> tuple[list[int], list[int]]:
    """s, t with s*a + t*b = 1 over F_q (a, b coprime)."""
    r0, r1 = _pmod(a, q), _pmod(b, q)
    s0, s1 = [1], []
    t0, t1 = [], [1]
    while r1:
        inv = pow(r1[-1], -1, q)
        qt, rr = _pdivmod_monic(r0, _pscale(r1, inv, q), q)
        qt = _pscale(qt, inv, q)
        r0, r1 = r1, rr
        s0, s1 = s1, _psub(s0, _pmul(qt, s1, q), q)
        t0, t1 = t1, _psub(t0, _pmul(qt, t1, q), q)
    if len(r0) != 1:
        raise ArithmeticError("polynomials are not coprime mod q")
    inv = pow(r0[0], -1, q)
    return _pscale(s0, inv, q), _pscale(t0, inv, q)


def _sym(a: Sequence[int], m: int) -> list[int]:
    half = m // 2
    return [c - m if c > half else c for c in a]


# --- Hensel lifting ---


def _hensel_step(m, f, g, h, s, t):
    m2 = m * m
    e = _psub(f, _pmul(g, h, m2), m2)
    qq, r = _pdivmod_monic(_pmul(s, e, m2), h, m2)
    g2 = _padd(g, _padd(_pmul(t, e, m2), _pmul(qq, g, m2), m2), m2)
    h2 = _padd(h, r, m2)
    b = _psub(_padd(_pmul(s, g2, m2), _pmul(t, h2, m2), m2), [1], m2)
    c, d = _pdivmod_monic(_pmul(s, b, m2), h2, m2)
    s2 = _psub(s, d, m2)
    t2 = _psub(t, _padd(_pmul(t, b, m2), _pmul(c, g2, m2), m2), m2)
    return g2, h2, s2, t2


def hensel_lift(f: IntPoly, factors: Sequence[ModPoly], exponent: int) -> tuple[list[list[int]], int]:
    """Lift ``f = lc(f) * prod(factors) mod q`` to modulus q**(2**j) >= q**exponent.

    The factors must be monic, pairwise coprime mod q, and q must not divide
    lc(f).  Returns the lifted monic factors and the final modulus.
    """
    q = factors[0].modulus
    steps = max(0, math.ceil(math.log2(max(exponent, 1))))
    M = q ** (2**steps)
    facs = [list(g.coeffs) for g in factors]
    return _lift_tree(list(f.coeffs), facs, q, steps, M), M


def _lift_tree(f, facs, q, steps, M):
    if len(facs) == 1:
        return [_pmonic(_pmod(f, M), M)]
    k = len(facs) // 2
    A, B = facs[:k], facs[k:]
    g = [f[-1] % q]
    for a in A:
        g = _pmul(g, a, q)
    h = [1]
    for b in B:
        h = _pmul(h, b, q)
    s, t = _xgcd_prime(g, h, q)
    m = q
    for _ in range(steps):
        g, h, s, t = _hensel_step(m, _pmod(f, m * m), g, h, s, t)
        m = m * m
    return _lift_tree(g, A, q, steps, M) + _lift_tree(h, B, q, steps, M)


# --- gcd and squarefree decomposition over Z ---


def _good_primes(f: IntPoly, count: int, start: int = 0) -> list[int]:
    """Primes q not dividing lc(f) with f mod q squarefree."""
    out = []
    from .finite_field import is_squarefree_mod_p

    for q in _PRIME_POOL[start:]:
        if f.lc % q == 0:
            continue
        if is_squarefree_mod_p(reduce_mod(f, q)):
            out.append(q)
            if len(out) >= count:
                break
    return out


def _large_primes(start: int = 2**25):
    from sympy import prevprime

    q = start
    while True:
        q = prevprime(q)
        yield q


def poly_gcd(f: IntPoly, g: IntPoly) -> IntPoly:
    """Primitive gcd of two integer polynomials (multi-modular, verified)."""
    if not f:
        return g.primitive()
    if not g:
        return f.primitive()
    f, g = f.primitive(), g.primitive()
    if f.degree == 0 or g.degree == 0:
        return IntPoly((1,))
    lcg = math.gcd(f.lc, g.lc)
    best_deg = None
    modulus = 1
    acc: list[int] = []
    prev = None
    for q in _large_primes():
        if lcg % q == 0 or f.lc % q == 0 or g.lc % q == 0:
            continue
        h = _gf.gcd(reduce_mod(f, q).array(), reduce_mod(g, q).array(), q)
        d = h.size - 1
        if best_deg is not None and d > best_deg:
            continue
        h = [int(c) * (lcg % q) % q for c in h]
        if best_deg is None or d < best_deg:
            best_deg = d
            modulus, acc, prev = q, h, None
            if d == 0:
                return IntPoly((1,))
            continue
        acc = [_crt2(a, modulus, b, q) for a, b in zip(acc, h)]
        modulus *= q
        cand = IntPoly(_sym(acc, modulus)).primitive()
        if cand == prev and cand.divides(f) and cand.divides(g):
            return cand
        prev = cand


def _crt2(a: int, m: int, b: int, n: int) -> int:
    t = (b - a) * pow(m, -1, n) % n
    return a + m * t


def is_squarefree(f: IntPoly) -> bool:
    if f.degree <= 1:
        return True
    from .finite_field import is_squarefree_mod_p

    for q in _PRIME_POOL[:30]:
        if f.lc % q and is_squarefree_mod_p(reduce_mod(f, q)):
            return True
    return poly_gcd(f, f.derivative()).degree == 0


def squarefree_decomposition(f: IntPoly) -> list[tuple[IntPoly, int]]:
    """Yun's algorithm on the primitive part; returns (squarefree factor, multiplicity)."""
    f = f.primitive()
    if f.degree <= 0:
        return []
    if is_squarefree(f):
        return [(f, 1)]
    df = f.derivative()
    a0 = poly_gcd(f, df)
    b = f // a0
    c = df // a0
    d = c - b.derivative()
    out = []
    i = 1
    while b.degree > 0:
        a = poly_gcd(b, d)
        b = b // a
        c = d // a
        d = c - b.derivative()
        if a.degree > 0:
            out.append((a.primitive(), i))
        i += 1
    return out


# --- degree-pattern certificates ---


def _subset_sums(profile: dict[int, int], n: int) -> int:
    """Bitset of achievable factor degrees given a mod-q degree profile."""
    bits = 1
    mask = (1 << (n + 1)) - 1
    for d, cnt in profile.items():
        for _ in range(cnt):
            bits = (bits | (bits << d)) & mask
    return bits


def _profile(f: IntPoly, q: int) -> tuple[dict[int, int], list[tuple[np.ndarray, int]]]:
    a = reduce_mod(f, q).monic().array()
    blocks = _ddf(a, q)
    prof = {d: (b.size - 1) // d for b, d in blocks}
    return prof, blocks


def admissible_degrees(f: IntPoly, primes: Sequence[int], low: int = 1) -> set[int]:
    """Proper factor degrees in [low, n - low] compatible with every prime's pattern."""
    n = f.degree
    allowed = (1 << (n + 1)) - 1
    for q in primes:
        prof, _ = _profile(f, q)
        allowed &= _subset_sums(prof, n)
        if not (allowed >> low) & ((1 << max(n - 2 * low + 1, 0)) - 1):
            break
    return {d for d in range(low, n - low + 1) if (allowed >> d) & 1}


# --- factorization of squarefree primitive polynomials ---


def _mignotte(f: IntPoly, d: int) -> int:
    norm2 = math.isqrt(f.norm2_sq()) + 1
    return abs(f.lc) * (2**d) * norm2


def _lifted(f: IntPoly, q: int, factors: list[ModPoly], bound: int):
    exponent = 1
    while q**exponent <= 2 * bound:
        exponent += 1
    return hensel_lift(f, factors, exponent)


def _recombine(f: IntPoly, lifted: list[list[int]], M: int, allowed: set[int] | None, max_degree: int):
    """Zassenhaus subset recombination.

    With ``max_degree < deg f`` only candidate factors up to that degree are
    tried, but all subset sizes are searched.  Returns (found factors,
    remaining cofactor).
    """
    found: list[IntPoly] = []
    T = list(range(len(lifted)))
    full = max_degree >= f.degree
    s = 1
    while s <= len(T):
        if full and 2 * s > len(T):
            break
        hit = False
        for S in combinations(T, s):
            dsum = sum(len(lifted[i]) - 1 for i in S)
            if dsum > max_degree or dsum >= f.degree:
                continue
            if allowed is not None and dsum not in allowed:
                continue
            lc = f.lc
            const = lc % M
            for i in S:
                const = const * lifted[i][0] % M
            const = _sym([const], M)[0]
            if const == 0 or (lc * f[0]) % const:
                continue
            g = [lc % M]
            for i in S:
                g = _pmul(g, lifted[i], M)
            cand = IntPoly(_sym(g, M)).primitive()
            if cand.divides(f):
                found.append(cand)
                f = f // cand
                T = [i for i in T if i not in S]
                full = max_degree >= f.degree
                hit = True
                break
        if not hit:
            s += 1
    return found, f


def _choose_prime(f: IntPoly, n_primes: int):
    primes = _good_primes(f, n_primes)
    if not primes:
        raise ArithmeticError("no suitable prime found for factorization")
    best = None
    allowed = (1 << (f.degree + 1)) - 1
    for q in primes:
        prof, blocks = _profile(f, q)
        allowed &= _subset_sums(prof, f.degree)
        nfac = sum(prof.values())
        if best is None or nfac < best[0]:
            best = (nfac, q, blocks)
    return best[1], best[2], allowed, primes


def _split_blocks(blocks, q, seed=0):
    rng = np.random.default_rng([seed, q])
    out = []
    for b, d in blocks:
        out.extend(_edf(b, d, q, rng))
    return [ModPoly.from_array(q, g) for g in out]


def _factor_squarefree(
    f: IntPoly, degree_cap: int, small_degree: int, n_primes: int
) -> tuple[list[IntPoly], set[int]]:
    """Factor a squarefree primitive f with positive lc.

    Returns factors and the positions (into that list) of unresolved ones.
    """
    n = f.degree
    if n <= 1:
        return [f], set()
    if f[0] == 0:
        x = IntPoly((0, 1))
        facs, unres = _factor_squarefree(f // x, degree_cap, small_degree, n_primes)
        return [x] + facs, {i + 1 for i in unres}
    q, blocks, allowed_bits, _ = _choose_prime(f, n_primes)
    allowed = {d for d in range(1, n) if (allowed_bits >> d) & 1}
    if not allowed:
        return [f], set()
    if n <= degree_cap:
        mod_factors = _split_blocks(blocks, q)
        lifted, M = _lifted(f, q, mod_factors, _mignotte(f, n))
        found, rest = _recombine(f, lifted, M, allowed, n)
        return sorted(found + [rest], key=_zkey), set()
    # hybrid: split off every factor of degree <= small_degree, certify the rest
    small_blocks = [(b, d) for b, d in blocks if d <= small_degree]
    found: list[IntPoly] = []
    rest = f
    if small_blocks:
        large = [(b, d) for b, d in blocks if d > small_degree]
        small_factors = _split_blocks(small_blocks, q)
        big_mod = ModPoly(q, (1,))
        for b, _ in large:
            big_mod = big_mod * ModPoly.from_array(q, b)
        lift_list = small_factors + ([big_mod] if big_mod.degree > 0 else [])
        lifted, M = _lifted(f, q, lift_list, _mignotte(f, small_degree))
        found, rest = _recombine(f, lifted, M, None, small_degree)
    if rest.degree <= 2 * small_degree + 1 and rest.degree <= degree_cap:
        sub, unres = _factor_squarefree(rest, degree_cap, small_degree, n_primes)
        return sorted(found + sub, key=_zkey), unres
    cert = admissible_degrees(rest, _good_primes(rest, n_primes), low=small_degree + 1)
    factors = sorted(found + [rest], key=_zkey)
    if cert:
        return factors, {factors.index(rest)}
    return factors, set()


def _zkey(g: IntPoly) -> tuple:
    return (g.degree, tuple(reversed(g.coeffs)))


def factor_over_Z(
    f: IntPoly,
    degree_cap: int = DEFAULT_DEGREE_CAP,
    small_degree: int = DEFAULT_SMALL_DEGREE,
    n_primes: int = DEFAULT_CERT_PRIMES,
) -> Factorization:
    """Factor a nonzero integer polynomial.

    Factors that could be neither split nor certified irreducible are
    listed in ``Factorization.unresolved``; everything else is proven.
    """
    if not f:
        raise ValueError("cannot factor the zero polynomial")
    content = f.content()
    unit = content if f.lc > 0 else -content
    if f.degree == 0:
        return Factorization(base=f, unit=f.lc, factors=())
    collected: list[tuple[IntPoly, int, bool]] = []
    for part, mult in squarefree_decomposition(f):
        facs, unres = _factor_squarefree(part, degree_cap, small_degree, n_primes)
        for i, g in enumerate(facs):
            collected.append((g, mult, i in unres))
    merged: dict[IntPoly, list] = {}
    for g, mult, unresolved in collected:
        if g in merged:
            merged[g][0] += mult
            merged[g][1] = merged[g][1] or unresolved
        else:
            merged[g] = [mult, unresolved]
    ordered = sorted(merged.items(), key=lambda kv: _zkey(kv[0]))
    factors = tuple((g, m) for g, (m, _) in ordered)
    unresolved = frozenset(i for i, (_, (_, u)) in enumerate(ordered) if u)
    return Factorization(base=f, unit=unit, factors=factors, unresolved=unresolved)


def certify_irreducible(f: IntPoly, n_primes: int = DEFAULT_CERT_PRIMES, low: int = 1) -> bool:
    """True iff mod-q degree patterns rule out every proper factor of degree >= low."""
    if f.degree <= 1:
        return f.degree == 1
    return not admissible_degrees(f, _good_primes(f, n_primes), low=low)


def rational_roots(f: IntPoly) -> list[int]:
    """Integer roots of a monic polynomial (via its linear factors)."""
    fac = factor_over_Z(f, degree_cap=0, small_degree=1)
    return sorted(-g[0] for g, _ in fac.factors if g.degree == 1 and g.lc == 1)
