"""Weight-2 modular symbols for Gamma_0(N), plus quotient by the star involution."""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import scipy.sparse as sp
from sympy import factorint

from .heilbronn import heilbronn_cremona
from .p1 import P1List, lift_to_sl2z

DEFAULT_SIZE_CAP = 20000


class BudgetError(RuntimeError):
    """The requested level exceeds the configured size cap."""


class LevelError(ValueError):
    pass


def is_squarefree(N: int) -> bool:
    return all(e == 1 for e in factorint(N).values())


def genus_x0(N: int) -> int:
    """Genus of X_0(N) from the Riemann-Hurwitz formula."""
    fac = factorint(N)
    mu = N
    for p in fac:
        mu = mu // p * (p + 1)
    if N % 4 == 0:
        nu2 = 0
    else:
        nu2 = 1
        for p in fac:
            nu2 *= 1 if p == 2 else (2 if p % 4 == 1 else 0)
    if N % 9 == 0:
        nu3 = 0
    else:
        nu3 = 1
        for p in fac:
            nu3 *= 1 if p == 3 else (2 if p % 3 == 1 else 0)
    cusps = sum(_euler_phi(math.gcd(d, N // d)) for d in range(1, N + 1) if N % d == 0)
    twelve_g = 12 + mu - 3 * nu2 - 4 * nu3 - 6 * cusps
    return twelve_g // 12


def _euler_phi(n: int) -> int:
    out = n
    for p in factorint(n):
        out = out // p * (p - 1)
    return out


# --- Manin symbol bookkeeping ---


def _cusp_manin(num: int, den: int) -> list[tuple[int, int]]:
    """Manin symbols (c, d) summing to {0, num/den}, via continued fractions."""
    out = [(0, 1)]
    if den == 0:
        return out
    if den < 0:
        num, den = -num, -den
    q2, q1 = 1, 0
    a, b = num, den
    sign = -1
    while b:
        t = a // b
        a, b = b, a - t * b
        q = t * q1 + q2
        out.append((sign * q, q1))
        q2, q1 = q1, q
        sign = -sign
    return out


def _cusps_equivalent(u1: int, v1: int, u2: int, v2: int, N: int) -> bool:
    """Gamma_0(N)-equivalence of the cusps u1/v1 and u2/v2 (lowest terms)."""
    s1 = _inverse_mod(u1, v1)
    s2 = _inverse_mod(u2, v2)
    g = math.gcd(v1 * v2, N)
    return (s1 * v2 - s2 * v1) % g == 0


def _inverse_mod(u: int, v: int) -> int:
    v = abs(v)
    if v == 0:
        return u
    if v == 1:
        return 0
    return pow(u % v, -1, v)


def _reduce_cusp(num: int, den: int) -> tuple[int, int]:
    g = math.gcd(num, den)
    num, den = num // g, den // g
    if den < 0 or (den == 0 and num < 0):
        num, den = -num, -den
    return num, den


def _eliminate(n_vars: int, relations: list[dict[int, int]]):
    """Sparse exact elimination of the relations.

    Returns (pivot expressions, free variables): every pivot variable v equals
    sum(coef * w) over free variables w.
    """
    rows: dict[int, dict[int, Fraction | int]] = {}
    order: dict[int, int] = {}
    for rel in relations:
        r = dict(rel)
        heap = [(order[v], v) for v in r if v in rows]
        heapq.heapify(heap)
        while heap:
            _, v = heapq.heappop(heap)
            c = r.pop(v, 0)
            if not c:
                continue
            for w, x in rows[v].items():
                y = r.get(w, 0) + c * x
                if y:
                    if w not in r and w in rows:
                        heapq.heappush(heap, (order[w], w))
                    r[w] = y
                else:
                    r.pop(w, None)
        if not r:
            continue
        unit = [v for v, c in r.items() if c in (1, -1)]
        v = max(unit) if unit else max(r)
        c = r.pop(v)
        # c * v + sum(x * w) = 0, so v = sum(-x / c * w)
        if c == 1:
            rows[v] = {w: -x for w, x in r.items()}
        elif c == -1:
            rows[v] = r
        else:
            rows[v] = {w: Fraction(-x) / c for w, x in r.items()}
        order[v] = len(order)
    # back substitution, latest pivot first
    final: dict[int, dict[int, Fraction | int]] = {}
    for v in sorted(order, key=order.__getitem__, reverse=True):
        out: dict[int, Fraction | int] = {}
        for w, x in rows[v].items():
            if w in final:
                for u, y in final[w].items():
                    z = out.get(u, 0) + x * y
                    if z:
                        out[u] = z
                    else:
                        out.pop(u, None)
            else:
                z = out.get(w, 0) + x
                if z:
                    out[w] = z
                else:
                    out.pop(w, None)
        final[v] = out
    free = [w for w in range(n_vars) if w not in final]
    return final, free


def _to_int_matrix(A) -> tuple[np.ndarray, int]:
    """Numerator array and common denominator of a rational matrix."""
    den = 1
    flat = A.ravel() if isinstance(A, np.ndarray) else [x for row in A for x in row]
    for x in flat:
        if isinstance(x, Fraction) and x.denominator != 1:
            den = den * x.denominator // math.gcd(den, x.denominator)
    if isinstance(A, np.ndarray) and A.dtype != object:
        return A.astype(np.int64), 1
    arr = np.array([[int(Fraction(x) * den) for x in row] for row in A], dtype=object)
    if arr.size == 0 or max(abs(int(x)) for x in arr.ravel()) < 2**62:
        arr = arr.astype(np.int64)
    return arr, den


@dataclass(frozen=True)
class RationalMatrix:
    """An exact matrix num / den with integer numerators."""

    num: np.ndarray
    den: int = 1

    @property
    def shape(self) -> tuple[int, int]:
        return self.num.shape

    def to_fractions(self) -> list[list[Fraction]]:
        return [[Fraction(int(x), self.den) for x in row] for row in self.num]

    def mod(self, q: int) -> np.ndarray:
        if self.den % q == 0:
            raise ZeroDivisionError(f"{q} divides the denominator")
        a = np.array(self.num % q, dtype=np.int64) if self.num.dtype == object else self.num % q
        if self.den != 1:
            a = (a * pow(self.den, -1, q)) % q
        return a

    def __matmul__(self, other: RationalMatrix) -> RationalMatrix:
        num = _exact_matmul(self.num, other.num)
        return _normalized(num, self.den * other.den)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(
            _exact_mul_scalar(self.num, other.den), _exact_mul_scalar(other.num, self.den)
        )

    def is_identity(self) -> bool:
        n, m = self.shape
        return n == m and np.array_equal(self.num, np.eye(n, dtype=np.int64) * self.den)

    @classmethod
    def identity(cls, n: int) -> RationalMatrix:
        return cls(np.eye(n, dtype=np.int64), 1)


def _exact_mul_scalar(a: np.ndarray, k: int) -> np.ndarray:
    if a.dtype != object and (a.size == 0 or int(np.abs(a).max()) * abs(k) < 2**62):
        return a * k
    return a.astype(object) * k


def _exact_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.dtype != object and b.dtype != object and a.size and b.size:
        bound = int(np.abs(a).max()) * int(np.abs(b).max()) * a.shape[1]
        if bound < 2**62:
            return a @ b
    return a.astype(object) @ b.astype(object)


def _normalized(num: np.ndarray, den: int) -> RationalMatrix:
    if den != 1 and num.size:
        g = den
        for x in num.ravel():
            g = math.gcd(g, int(x))
            if g == 1:
                break
        if g > 1:
            num = num // g
            den //= g
    if num.dtype == object and (num.size == 0 or max(abs(int(x)) for x in num.ravel()) < 2**62):
        num = num.astype(np.int64)
    return RationalMatrix(num, den)


@dataclass
class ModSymSpace:
    """Plus quotient of weight-2 modular symbols for Gamma_0(N).

    The ambient basis is a set of Manin symbols (``basis_points``); every
    point of P^1(Z/N) maps to an integral or rational combination of them
    through ``quotient``.  The cuspidal subspace is the kernel of the
    boundary map; vectors in it are determined by their ``cusp_free``
    coordinates, which gives cuspidal coordinates with no extra solving.
    """

    N: int
    p1: P1List
    basis_points: list[int]
    quotient: sp.csr_matrix  # |P1| x dim, numerators
    quotient_den: int
    boundary: np.ndarray  # dim x (cusp classes), integers
    cusp_free: list[int]
    cusp_pivots: list[int]
    cusp_relations: list[list[Fraction]]  # row i: pivot i = -sum(rel[i][j] * free_j)
    _hecke_cache: dict = field(default_factory=dict, repr=False)

    @property
    def dimension(self) -> int:
        return len(self.basis_points)

    @property
    def cuspidal_dimension(self) -> int:
        return len(self.cusp_free)

    def cuspidal_basis(self) -> list[list[Fraction]]:
        """Basis of the cuspidal subspace in ambient coordinates."""
        out = []
        for j, f in enumerate(self.cusp_free):
            v = [Fraction(0)] * self.dimension
            v[f] = Fraction(1)
            for i, p in enumerate(self.cusp_pivots):
                v[p] = -self.cusp_relations[i][j]
            out.append(v)
        return out

    # -- ambient operators --

    def _images_to_matrix(self, src: np.ndarray, dst: np.ndarray, coef: np.ndarray) -> RationalMatrix:
        """Matrix whose row b is sum coef * quotient[dst] over entries with src = b."""
        A = sp.csr_matrix(
            (coef.astype(np.int64), (src, dst)),
            shape=(self.dimension, len(self.p1)),
        )
        M = (A @ self.quotient).toarray()
        return _normalized(M.astype(np.int64), self.quotient_den)

    def ambient_hecke(self, ell: int) -> RationalMatrix:
        return self.ambient_heilbronn(heilbronn_cremona(ell))

    def ambient_heilbronn(self, H: np.ndarray) -> RationalMatrix:
        pts = np.array([self.p1.points[i] for i in self.basis_points], dtype=np.int64).reshape(-1, 2)
        u = pts[:, :1]
        v = pts[:, 1:]
        a, b, c, d = (H[:, k][None, :] for k in range(4))
        idx = self.p1.index_array(u * a + v * c, u * b + v * d)
        src = np.repeat(np.arange(self.dimension), H.shape[0])
        return self._images_to_matrix(src, idx.ravel(), np.ones(idx.size, dtype=np.int64))

    def ambient_atkin_lehner(self) -> RationalMatrix:
        N = self.N
        src, dst, coef = [], [], []
        for b, i in enumerate(self.basis_points):
            c0, d0 = self.p1.points[i]
            a, bb, c, d = lift_to_sl2z(c0, d0, N)
            # W = [[0, -1], [N, 0]] sends the cusp x/y to -y/(N x)
            for num, den, s in ((-c, N * a, 1), (-d, N * bb, -1)):
                for cc, dd in _cusp_manin(*_reduce_cusp(num, den)):
                    src.append(b)
                    dst.append(self.p1.index(cc, dd))
                    coef.append(s)
        return self._images_to_matrix(np.array(src), np.array(dst), np.array(coef))

    def restrict_to_cuspidal(self, A: RationalMatrix) -> RationalMatrix:
        """Matrix of a Hecke-stable operator on the cuspidal basis (row convention)."""
        free, piv = self.cusp_free, self.cusp_pivots
        T = A.to_fractions() if (A.den != 1 or A.num.dtype == object) else A.num.tolist()
        out = [[T[f][g] for g in free] for f in free]
        if piv:
            for j, f in enumerate(free):
                row = out[j]
                for i, p in enumerate(piv):
                    c = self.cusp_relations[i][j]
                    if c:
                        Tp = T[p]
                        for k, g in enumerate(free):
                            row[k] -= c * Tp[g]
        num, den = _to_int_matrix(out)
        return RationalMatrix(num, den)


def build_space(N: int, size_cap: int = DEFAULT_SIZE_CAP) -> ModSymSpace:
    """Plus quotient of weight-2 modular symbols for Gamma_0(N) with its cuspidal subspace."""
    if N < 1:
        raise LevelError("level must be positive")
    if N > size_cap:
        raise BudgetError(f"level {N} exceeds the size cap {size_cap}")
    p1 = P1List(N)
    n = len(p1)
    pts = p1.points

    def act(i: int, kind: str) -> int:
        c, d = pts[i]
        if kind == "S":
            return p1.index(d, -c)
        if kind == "I":
            return p1.index(-c, d)
        return p1.index(d, -c - d)  # T

    # 2-term (x + xS = 0) and star (x = xI) relations: signed orbits
    gen_of = np.full(n, -1, dtype=np.int64)
    sign_of = np.zeros(n, dtype=np.int64)
    n_gens = 0
    for i in range(n):
        if sign_of[i] or gen_of[i] == -2:
            continue
        orbit = {i: 1}
        stack = [i]
        bad = False
        while stack:
            j = stack.pop()
            for kind, s in (("S", -1), ("I", 1)):
                k = act(j, kind)
                val = orbit[j] * s
                if k in orbit:
                    if orbit[k] != val:
                        bad = True
                else:
                    orbit[k] = val
                    stack.append(k)
        if bad:
            for j in orbit:
                gen_of[j] = -2
        else:
            for j, s in orbit.items():
                gen_of[j] = n_gens
                sign_of[j] = s
            n_gens += 1
    gen_point = [0] * n_gens
    for i in range(n - 1, -1, -1):
        if gen_of[i] >= 0:
            gen_point[gen_of[i]] = i

    # 3-term relations x + xT + xT^2 = 0
    seen = np.zeros(n, dtype=bool)
    relations = []
    distinct = set()
    for i in range(n):
        if seen[i]:
            continue
        j = act(i, "T")
        k = act(j, "T")
        seen[[i, j, k]] = True
        rel: dict[int, int] = {}
        for t in (i, j, k):
            if gen_of[t] >= 0:
                g = int(gen_of[t])
                rel[g] = rel.get(g, 0) + int(sign_of[t])
        rel = {g: c for g, c in rel.items() if c}
        if not rel:
            continue
        first = min(rel)
        if rel[first] < 0:
            rel = {g: -c for g, c in rel.items()}
        key = tuple(sorted(rel.items()))
        if key not in distinct:
            distinct.add(key)
            relations.append(rel)

    pivots, free = _eliminate(n_gens, relations)
    position = {g: k for k, g in enumerate(free)}
    dim = len(free)

    # quotient map P^1 -> ambient basis, as integer numerators over a common denominator
    den = 1
    for row in pivots.values():
        for x in row.values():
            if isinstance(x, Fraction) and x.denominator != 1:
                den = den * x.denominator // math.gcd(den, x.denominator)
    rows_i, cols_i, vals = [], [], []
    for i in range(n):
        g = int(gen_of[i])
        if g < 0:
            continue
        s = int(sign_of[i])
        if g in position:
            rows_i.append(i)
            cols_i.append(position[g])
            vals.append(s * den)
        else:
            for w, x in pivots[g].items():
                rows_i.append(i)
                cols_i.append(position[w])
                vals.append(int(s * x * den))
    quotient = sp.csr_matrix(
        (
            np.array(vals, dtype=np.int64),
            (np.array(rows_i, dtype=np.int64), np.array(cols_i, dtype=np.int64)),
        ),
        shape=(n, dim),
    )
    basis_points = [gen_point[g] for g in free]

    # boundary: [a/c] - [b/d] for the Manin symbol with lift [[a, b], [c, d]]
    classes: list[tuple[int, int]] = []

    def cusp_class(num: int, den: int) -> int:
        num, den = _reduce_cusp(num, den)
        for k, (u, v) in enumerate(classes):
            if _cusps_equivalent(num, den, u, v, N) or _cusps_equivalent(-num, den, u, v, N):
                return k
        classes.append((num, den))
        return len(classes) - 1

    entries = []
    for b, i in enumerate(basis_points):
        a, bb, c, d = lift_to_sl2z(*pts[i], N)
        entries.append((b, cusp_class(a, c), 1))
        entries.append((b, cusp_class(bb, d), -1))
    boundary = np.zeros((dim, len(classes)), dtype=np.int64)
    for b, k, s in entries:
        boundary[b, k] += s

    free_c, piv_c, rel_c = _cuspidal_kernel(boundary)
    return ModSymSpace(
        N=N,
        p1=p1,
        basis_points=basis_points,
        quotient=quotient,
        quotient_den=den,
        boundary=boundary,
        cusp_free=free_c,
        cusp_pivots=piv_c,
        cusp_relations=rel_c,
    )


def _cuspidal_kernel(B: np.ndarray):
    """Left kernel {v : v B = 0} via reduced row echelon form of B^T over Q."""
    dim, k = B.shape
    R = [[Fraction(int(B[i, j])) for i in range(dim)] for j in range(k)]
    pivots = []
    row = 0
    for col in range(dim):
        if row == len(R):
            break
        p = next((r for r in range(row, len(R)) if R[r][col] != 0), None)
        if p is None:
            continue
        R[row], R[p] = R[p], R[row]
        inv = 1 / R[row][col]
        R[row] = [x * inv for x in R[row]]
        for r in range(len(R)):
            if r != row and R[r][col] != 0:
                f = R[r][col]
                R[r] = [x - f * y for x, y in zip(R[r], R[row])]
        pivots.append(col)
        row += 1
    free = [c for c in range(dim) if c not in set(pivots)]
    rel = [[R[i][f] for f in free] for i in range(len(pivots))]
    return free, pivots, rel
