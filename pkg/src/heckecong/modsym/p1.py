"""The projective line P^1(Z/N) and lifts of its points to SL_2(Z)."""

from __future__ import annotations

import math

import numpy as np
from sympy import divisors, isprime

# composite levels up to this size get a dense (c, d) -> index table
_TABLE_LIMIT = 2048


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    u0, v0, u1, v1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        u0, u1 = u1, u0 - q * u1
        v0, v1 = v1, v0 - q * v1
    if a < 0:
        return -a, -u0, -v0
    return a, u0, v0


def normalize(N: int, c: int, d: int) -> tuple[int, int]:
    """Canonical representative (u, v) of the point (c : d) of P^1(Z/N)."""
    if N == 1:
        return (0, 0)
    c %= N
    d %= N
    if c == 0:
        if math.gcd(d, N) != 1:
            raise ValueError(f"({c}:{d}) is not a point of P^1(Z/{N})")
        return (0, 1)
    g, s, _ = _xgcd(c, N)
    if math.gcd(g, d) != 1:
        raise ValueError(f"({c}:{d}) is not a point of P^1(Z/{N})")
    ng = N // g
    s %= N
    while math.gcd(s, N) != 1:
        s = (s + ng) % N
    v = s * d % N
    # units t = 1 mod N/g fix the first coordinate g; take the least v
    best = v
    t = 1
    step = v * ng % N
    w = v
    for _ in range(1, g):
        t += ng
        w = (w + step) % N
        if w < best and math.gcd(t, N) == 1:
            best = w
    return (g, best)


def lift_to_sl2z(c: int, d: int, N: int) -> tuple[int, int, int, int]:
    """(a, b, c', d') in SL_2(Z) with (c', d') = (c, d) mod N."""
    if N == 1:
        return (1, 0, 0, 1)
    c %= N
    d %= N
    if c == 0:
        c = N
    if d == 0:
        d = N
    while math.gcd(c, d) != 1:
        d += N
    _, x, y = _xgcd(d, c)
    return (x, -y, c, d)


class P1List:
    """Points of P^1(Z/N) with fast index lookup."""

    def __init__(self, N: int):
        if N < 1:
            raise ValueError("level must be positive")
        self.N = N
        self.is_prime = N > 1 and isprime(N)
        if N == 1:
            self.points = [(0, 0)]
        elif self.is_prime:
            self.points = [(1, t) for t in range(N)] + [(0, 1)]
        else:
            pts = [(0, 1)]
            for g in divisors(N)[:-1]:
                for v in range(N):
                    if math.gcd(g, v) == 1 and normalize(N, g, v) == (g, v):
                        pts.append((g, v))
            self.points = sorted(pts)
        self._index = {pt: i for i, pt in enumerate(self.points)}
        self._table = None
        self._inv = None
        if self.is_prime:
            inv = np.zeros(N, dtype=np.int64)
            inv[1:] = [pow(t, -1, N) for t in range(1, N)]
            self._inv = inv
        elif 1 < N <= _TABLE_LIMIT:
            self._table = self._build_table()

    def __len__(self) -> int:
        return len(self.points)

    def _build_table(self) -> np.ndarray:
        N = self.N
        table = np.full((N, N), -1, dtype=np.int64)
        u = np.array([p[0] for p in self.points], dtype=np.int64)
        v = np.array([p[1] for p in self.points], dtype=np.int64)
        idx = np.arange(len(self.points), dtype=np.int64)
        for t in range(1, N):
            if math.gcd(t, N) == 1:
                table[(t * u) % N, (t * v) % N] = idx
        return table

    def index(self, c: int, d: int) -> int:
        N = self.N
        if N == 1:
            return 0
        if self.is_prime:
            c %= N
            if c == 0:
                return N
            return d * int(self._inv[c]) % N
        if self._table is not None:
            i = int(self._table[c % N, d % N])
            if i < 0:
                raise ValueError(f"({c}:{d}) is not a point of P^1(Z/{N})")
            return i
        return self._index[normalize(N, c, d)]

    def index_array(self, c: np.ndarray, d: np.ndarray) -> np.ndarray:
        N = self.N
        c = np.asarray(c, dtype=np.int64) % N if N > 1 else np.zeros_like(c)
        d = np.asarray(d, dtype=np.int64) % N if N > 1 else np.zeros_like(d)
        if N == 1:
            return np.zeros(c.shape, dtype=np.int64)
        if self.is_prime:
            out = (d * self._inv[c]) % N
            out[c == 0] = N
            return out
        if self._table is not None:
            out = self._table[c, d]
            if (out < 0).any():
                raise ValueError("input contains points outside P^1(Z/N)")
            return out
        flat = [self.index(int(x), int(y)) for x, y in zip(c.ravel(), d.ravel())]
        return np.array(flat, dtype=np.int64).reshape(c.shape)
