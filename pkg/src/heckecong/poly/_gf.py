"""numpy kernels for F_p[X] on int64 arrays (ascending, no trailing zeros).

All inputs are assumed reduced into [0, p).  Elementwise products need
p < 2**31; convolutions fall back to object arrays when the accumulated
sum could overflow int64.
"""

from __future__ import annotations

import numpy as np

_I64_LIMIT = 2**63 - 1


def asarray(coeffs, p: int) -> np.ndarray:
    if p >= 2**31:
        raise ValueError(f"modulus {p} too large for int64 kernels")
    a = np.asarray(list(coeffs), dtype=np.int64) % p
    return strip(a)


def strip(a: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(a)
    if nz.size == 0:
        return a[:0]
    return a[: nz[-1] + 1]


def _safe_conv(n: int, p: int) -> bool:
    return n * (p - 1) * (p - 1) < _I64_LIMIT


def mul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    if a.size == 0 or b.size == 0:
        return a[:0]
    if _safe_conv(min(a.size, b.size), p):
        return strip(np.convolve(a, b) % p)
    c = np.convolve(a.astype(object), b.astype(object)) % p
    return strip(c.astype(np.int64))


def matvec(v: np.ndarray, M: np.ndarray, p: int) -> np.ndarray:
    """Row vector times matrix mod p (v has length M.shape[0])."""
    if v.size == 0:
        return np.zeros(M.shape[1], dtype=np.int64)
    if _safe_conv(v.size, p):
        return (v @ M) % p
    return ((v.astype(object) @ M.astype(object)) % p).astype(np.int64)


def add(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    if a.size < b.size:
        a, b = b, a
    c = a.copy()
    c[: b.size] = (c[: b.size] + b) % p
    return strip(c)


def sub(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    n = max(a.size, b.size)
    c = np.zeros(n, dtype=np.int64)
    c[: a.size] = a
    c[: b.size] = (c[: b.size] - b) % p
    return strip(c)


def monic(a: np.ndarray, p: int) -> np.ndarray:
    if a.size == 0 or a[-1] == 1:
        return a
    inv = pow(int(a[-1]), -1, p)
    return (a * inv) % p


def divmod_(a: np.ndarray, b: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray]:
    if b.size == 0:
        raise ZeroDivisionError("polynomial division by zero")
    db = b.size - 1
    if a.size <= db:
        return a[:0], a
    r = a.copy()
    inv = pow(int(b[-1]), -1, p)
    q = np.zeros(a.size - db, dtype=np.int64)
    bm = b[:-1]
    for i in range(a.size - 1 - db, -1, -1):
        c = int(r[i + db])
        if c == 0:
            continue
        qi = c * inv % p
        q[i] = qi
        if db:
            r[i : i + db] = (r[i : i + db] - qi * bm) % p
        r[i + db] = 0
    return strip(q), strip(r[:db])


def rem(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    return divmod_(a, b, p)[1]


def gcd(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Monic gcd (zero if both inputs are zero)."""
    while b.size:
        a, b = b, rem(a, b, p)
    return monic(a, p)


def derivative(a: np.ndarray, p: int) -> np.ndarray:
    if a.size <= 1:
        return a[:0]
    return strip((a[1:] * (np.arange(1, a.size, dtype=np.int64) % p)) % p)


def x_poly() -> np.ndarray:
    return np.array([0, 1], dtype=np.int64)


def one() -> np.ndarray:
    return np.array([1], dtype=np.int64)


class ModulusRing:
    """Fast arithmetic in F_p[X]/(f) for a fixed monic f.

    Reduction uses a precomputed table of X^(n+j) mod f, so a product
    costs one convolution plus one matrix-vector product.
    """

    def __init__(self, f: np.ndarray, p: int):
        f = monic(f, p)
        self.f = f
        self.p = p
        self.n = n = f.size - 1
        table = np.zeros((max(n - 1, 0), n), dtype=np.int64)
        if n >= 1:
            row = (-f[:-1]) % p
            for j in range(n - 1):
                table[j] = row
                lead = int(row[-1])
                row = np.concatenate(([0], row[:-1]))
                if lead:
                    row = (row - lead * f[:-1]) % p
        self.table = table

    def reduce(self, c: np.ndarray) -> np.ndarray:
        n = self.n
        if c.size <= n:
            return strip(c % self.p)
        if c.size - n > self.table.shape[0]:
            return rem(strip(c % self.p), self.f, self.p)
        low = np.zeros(n, dtype=np.int64)
        low[: min(n, c.size)] = c[:n]
        high = c[n:]
        out = (low + matvec(high, self.table[: high.size], self.p)) % self.p
        return strip(out)

    def mul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return self.reduce(mul(a, b, self.p))

    def pow(self, a: np.ndarray, e: int) -> np.ndarray:
        result = one() if self.n > 0 else a[:0]
        base = self.reduce(a)
        while e:
            if e & 1:
                result = self.mul(result, base)
            e >>= 1
            if e:
                base = self.mul(base, base)
        return result

    def dense(self, a: np.ndarray) -> np.ndarray:
        out = np.zeros(self.n, dtype=np.int64)
        out[: a.size] = a
        return out

    def frobenius_matrix(self) -> np.ndarray:
        """Rows X^(p*i) mod f, i < n; v @ Q is the coefficient vector of g^p."""
        n, p = self.n, self.p
        Q = np.zeros((n, n), dtype=np.int64)
        if n == 0:
            return Q
        xp = self.pow(x_poly(), p)
        cur = one()
        for i in range(n):
            Q[i] = self.dense(cur)
            if i + 1 < n:
                cur = self.mul(cur, xp)
        return Q

    def apply_frobenius(self, a: np.ndarray, Q: np.ndarray) -> np.ndarray:
        return strip(matvec(self.dense(a), Q, self.p))
