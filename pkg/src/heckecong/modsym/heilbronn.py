"""Heilbronn matrices of determinant ell, stored as (a, b, c, d) rows."""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from sympy import isprime


def _round_half_away(a: int, b: int) -> int:
    """a / b rounded to the nearest integer, ties away from zero."""
    q, r = divmod(abs(a), abs(b))
    if 2 * r >= abs(b):
        q += 1
    return q if (a >= 0) == (b > 0) else -q


@lru_cache(maxsize=64)
def heilbronn_cremona(ell: int) -> np.ndarray:
    """Cremona's family for a prime ell, built from continued fractions of r/ell."""
    if not isprime(ell):
        raise ValueError(f"{ell} is not prime")
    if ell == 2:
        rows = [(1, 0, 0, 2), (2, 0, 0, 1), (2, 1, 0, 1), (1, 0, 1, 2)]
        return np.array(rows, dtype=np.int64)
    rows = [(1, 0, 0, ell)]
    half = ell // 2
    for r in range(-half, half + 1):
        x1, x2, y1, y2 = ell, -r, 0, 1
        a, b = -ell, r
        rows.append((x1, x2, y1, y2))
        while b != 0:
            q = _round_half_away(a, b)
            c = a - b * q
            a, b = -b, c
            x1, x2 = x2, q * x2 - x1
            y1, y2 = y2, q * y2 - y1
            rows.append((x1, x2, y1, y2))
    out = np.array(rows, dtype=np.int64)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=64)
def heilbronn_merel(n: int) -> np.ndarray:
    """Merel's set: a > b >= 0, d > c >= 0, ad - bc = n."""
    rows = []
    for a in range(1, n + 1):
        for d in range(1, n + 1):
            bc = a * d - n
            if bc < 0:
                continue
            if bc == 0:
                rows.extend((a, 0, c, d) for c in range(d))
                rows.extend((a, b, 0, d) for b in range(1, a))
                continue
            for b in range(1, a):
                if bc % b == 0:
                    c = bc // b
                    if c < d:
                        rows.append((a, b, c, d))
    out = np.array(rows, dtype=np.int64)
    out.setflags(write=False)
    return out
