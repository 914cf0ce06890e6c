"""Class groups of imaginary quadratic orders via reduced binary quadratic forms."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from sympy import factorint, isprime
from sympy.ntheory import sqrt_mod


class InertPrime(ValueError):
    """The prime is inert in the quadratic field: no form of norm ell exists."""


class DiscriminantError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class QuadForm:
    """The positive definite form a*x^2 + b*x*y + c*y^2."""

    a: int
    b: int
    c: int

    @property
    def discriminant(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def is_reduced(self) -> bool:
        a, b, c = self.a, self.b, self.c
        if not (abs(b) <= a <= c):
            return False
        if (abs(b) == a or a == c) and b < 0:
            return False
        return True

    def reduced(self) -> QuadForm:
        a, b, c = self.a, self.b, self.c
        if a <= 0 or b * b - 4 * a * c >= 0:
            raise DiscriminantError(f"{self} is not positive definite")
        a, b, c = _normalize(a, b, c)
        while a > c or (a == c and b < 0):
            a, b, c = _normalize(c, -b, a)
        return QuadForm(a, b, c)

    def inverse(self) -> QuadForm:
        return QuadForm(self.a, -self.b, self.c).reduced()

    def is_principal(self) -> bool:
        return self.a == 1

    def __mul__(self, other: QuadForm) -> QuadForm:
        return compose(self, other)

    def __pow__(self, e: int) -> QuadForm:
        if e < 0:
            return self.inverse() ** (-e)
        result = principal_form(self.discriminant)
        base = self.reduced()
        while e:
            if e & 1:
                result = compose(result, base)
            e >>= 1
            if e:
                base = compose(base, base)
        return result

    def as_list(self) -> list[int]:
        return [self.a, self.b, self.c]

    def __str__(self) -> str:
        return f"({self.a},{self.b},{self.c})"


def _normalize(a: int, b: int, c: int) -> tuple[int, int, int]:
    # move b into (-a, a]
    r = (a - b) // (2 * a)
    return a, b + 2 * r * a, a * r * r + b * r + c


def check_discriminant(D: int) -> None:
    if D >= 0 or D % 4 not in (0, 1):
        raise DiscriminantError(f"{D} is not a negative discriminant (need D < 0, D = 0 or 1 mod 4)")


def principal_form(D: int) -> QuadForm:
    check_discriminant(D)
    b = D % 2
    return QuadForm(1, b, (b * b - D) // 4)


def enumerate_reduced(D: int) -> list[QuadForm]:
    """All reduced primitive forms of discriminant D, sorted."""
    check_discriminant(D)
    out = []
    amax = math.isqrt(-D // 3)
    for a in range(1, amax + 1):
        for b in range(-a + 1, a + 1):
            if (b - D) % 2:
                continue
            num = b * b - D
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a or (c == a and b < 0):
                continue
            if math.gcd(math.gcd(a, b), c) != 1:
                continue
            out.append(QuadForm(a, b, c))
    return sorted(out)


def class_number(D: int) -> int:
    return len(enumerate_reduced(D))


def compose(f: QuadForm, g: QuadForm) -> QuadForm:
    """Gauss composition followed by reduction."""
    D = f.discriminant
    if g.discriminant != D:
        raise DiscriminantError(f"discriminants differ: {D} vs {g.discriminant}")
    a1, b1, c1 = f.a, f.b, f.c
    a2, b2, c2 = g.a, g.b, g.c
    if a1 > a2:
        a1, b1, c1, a2, b2, c2 = a2, b2, c2, a1, b1, c1
    s = (b1 + b2) // 2
    n = b2 - s
    if a2 % a1 == 0:
        y1, d = 0, a1
    else:
        d, u, _ = _xgcd(a2, a1)
        y1 = u
    if s % d == 0:
        y2, x2, d1 = -1, 0, d
    else:
        d1, x2, y2 = _xgcd(s, d)
        y2 = -y2
    v1 = a1 // d1
    v2 = a2 // d1
    r = (y1 * y2 * n - x2 * c2) % v1
    b3 = b2 + 2 * v2 * r
    a3 = v1 * v2
    c3 = (b3 * b3 - D) // (4 * a3)
    return QuadForm(a3, b3, c3).reduced()


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """(g, u, v) with u*a + v*b = g = gcd(a, b) >= 0."""
    u0, v0, u1, v1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        u0, u1 = u1, u0 - q * u1
        v0, v1 = v1, v0 - q * v1
    if a < 0:
        return -a, -u0, -v0
    return a, u0, v0


def kronecker(D: int, ell: int) -> int:
    """Kronecker symbol (D | ell) for a prime ell."""
    if ell == 2:
        if D % 2 == 0:
            return 0
        return 1 if D % 8 in (1, 7) else -1
    r = D % ell
    if r == 0:
        return 0
    return 1 if pow(r, (ell - 1) // 2, ell) == 1 else -1


def prime_form(D: int, ell: int) -> QuadForm:
    """Reduced class of a form (ell, b, c) of discriminant D."""
    check_discriminant(D)
    if not isprime(ell):
        raise ValueError(f"{ell} is not prime")
    if kronecker(D, ell) == -1:
        raise InertPrime(f"{ell} is inert in Q(sqrt({D}))")
    if ell == 2:
        b = D % 2 if D % 8 != 1 else 1
        if D % 4 == 0:
            b = 0 if (D // 4) % 2 == 0 else 2
    else:
        b = 0 if D % ell == 0 else int(sqrt_mod(D % ell, ell))
        if (b - D) % 2:
            b = ell - b if b else ell
    c = (b * b - D) // (4 * ell)
    if b * b - 4 * ell * c != D:
        raise ValueError(f"no prime form of norm {ell} for discriminant {D}")
    return QuadForm(ell, b, c).reduced()


def order_from_multiple(f: QuadForm, multiple: int) -> int:
    """Order of f given any multiple of it (for example h)."""
    order = multiple
    for q in factorint(multiple):
        while order % q == 0 and (f ** (order // q)).is_principal():
            order //= q
    return order


def bsgs_log(g: QuadForm, x: QuadForm, order: int) -> int | None:
    """Smallest e in [0, order) with g^e = x, or None (baby-step giant-step)."""
    m = math.isqrt(order - 1) + 1 if order > 1 else 1
    baby = {}
    cur = principal_form(g.discriminant)
    for j in range(m):
        baby.setdefault(cur, j)
        cur = cur * g
    giant = (g**m).inverse()
    y = x.reduced()
    for i in range(m + 1):
        if y in baby:
            e = i * m + baby[y]
            if e < order:
                return e
        y = y * giant
    return None


def form_order(f: QuadForm) -> int:
    """Least r >= 1 with f^r principal."""
    return order_from_multiple(f.reduced(), class_number(f.discriminant))


def order_in_unit_quotient(p: int, r: int) -> int:
    """Least m >= 1 with p^m = +-1 mod r."""
    if r < 1:
        raise ValueError("r must be positive")
    if math.gcd(p, r) != 1:
        raise ValueError(f"{p} is not a unit modulo {r}")
    if r <= 2:
        return 1
    m, x = 1, p % r
    while x not in (1, r - 1):
        x = x * p % r
        m += 1
    return m


# --- group structure ---


def _smith(R: list[list[int]]) -> tuple[list[int], list[list[int]]]:
    """Smith normal form of a square nonsingular integer matrix.

    Returns (diagonal, V) with U*R*V = diag for some unimodular U.
    """
    n = len(R)
    A = [row[:] for row in R]
    V = [[int(i == j) for j in range(n)] for i in range(n)]
    for t in range(n):
        while True:
            # pivot: smallest nonzero entry in the trailing block
            piv = None
            for i in range(t, n):
                for j in range(t, n):
                    if A[i][j] and (piv is None or abs(A[i][j]) < abs(A[piv[0]][piv[1]])):
                        piv = (i, j)
            if piv is None:
                break
            i, j = piv
            A[t], A[i] = A[i], A[t]
            for row in A:
                row[t], row[j] = row[j], row[t]
            for row in V:
                row[t], row[j] = row[j], row[t]
            done = True
            for i in range(t + 1, n):
                q = A[i][t] // A[t][t]
                if q:
                    A[i] = [x - q * y for x, y in zip(A[i], A[t])]
                if A[i][t]:
                    done = False
            for j in range(t + 1, n):
                q = A[t][j] // A[t][t]
                if q:
                    for row in A:
                        row[j] -= q * row[t]
                    for row in V:
                        row[j] -= q * row[t]
                if A[t][j]:
                    done = False
            if not done:
                continue
            bad = None
            for i in range(t + 1, n):
                for j in range(t + 1, n):
                    if A[i][j] % A[t][t]:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            A[t] = [x + y for x, y in zip(A[t], A[bad])]
    diag = [abs(A[i][i]) for i in range(n)]
    for i in range(n):
        if A[i][i] < 0:
            for row in V:
                row[i] = -row[i]
    return diag, V


def _inverse_unimodular(V: list[list[int]]) -> list[list[int]]:
    from fractions import Fraction

    n = len(V)
    A = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(V)]
    for c in range(n):
        p = next(r for r in range(c, n) if A[r][c] != 0)
        A[c], A[p] = A[p], A[c]
        inv = 1 / A[c][c]
        A[c] = [x * inv for x in A[c]]
        for r in range(n):
            if r != c and A[r][c] != 0:
                f = A[r][c]
                A[r] = [x - f * y for x, y in zip(A[r], A[c])]
    return [[int(x) for x in row[n:]] for row in A]


def small_split_primes(D: int, count: int, start: int = 2):
    ell = start
    found = 0
    while found < count:
        if isprime(ell) and kronecker(D, ell) != -1 and D % ell != 0:
            yield ell
            found += 1
        ell += 1


@dataclass
class ClassGroup:
    """Structure of Cl(D) as Z/d_1 x ... x Z/d_k with d_1 | d_2 | ... | d_k."""

    discriminant: int
    h: int
    elementary_divisors: tuple[int, ...]
    generators: tuple[QuadForm, ...]
    _table: dict = field(default=None, repr=False, compare=False)

    @property
    def exponent(self) -> int:
        return self.elementary_divisors[-1] if self.elementary_divisors else 1

    @property
    def is_cyclic(self) -> bool:
        return len(self.elementary_divisors) <= 1

    def coordinates(self, f: QuadForm) -> tuple[int, ...]:
        """Exponent vector of f with respect to ``generators``."""
        f = f.reduced()
        if f.discriminant != self.discriminant:
            raise DiscriminantError("form has the wrong discriminant")
        if not self.generators:
            return ()
        if self.is_cyclic:
            e = bsgs_log(self.generators[0], f, self.h)
            if e is None:
                raise ValueError(f"{f} not in the group")
            return (e,)
        if self._table is None:
            self._table = self._subgroup_table()
        g = self.generators[-1]
        d = self.elementary_divisors[-1]
        y = f
        step = g.inverse()
        for e in range(d):
            if y in self._table:
                return self._table[y] + (e,)
            y = y * step
        raise ValueError(f"{f} not in the group")

    def _subgroup_table(self) -> dict:
        table = {principal_form(self.discriminant): ()}
        for g, d in zip(self.generators[:-1], self.elementary_divisors[:-1]):
            new = {}
            for x, coords in table.items():
                y = x
                for e in range(d):
                    new[y] = coords + (e,)
                    y = y * g
            table = new
        return table

    def to_dict(self) -> dict:
        return {
            "discriminant": self.discriminant,
            "h": self.h,
            "divisors": list(self.elementary_divisors),
            "generators": [g.as_list() for g in self.generators],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> ClassGroup:
        obj = json.loads(text)
        return cls(
            discriminant=obj["discriminant"],
            h=obj["h"],
            elementary_divisors=tuple(obj["divisors"]),
            generators=tuple(QuadForm(*g) for g in obj["generators"]),
        )

    def cyclic_quotient_orders(self) -> list[int]:
        """Orders of all cyclic quotients (the divisors of the exponent)."""
        d = self.exponent
        return [r for r in range(1, d + 1) if d % r == 0]


def group_structure(D: int, n_primes: int = 20) -> ClassGroup:
    """Elementary divisors and generators of Cl(D).

    Prime forms of small split primes are added one at a time; the order of
    each new form modulo the subgroup found so far gives a relation.  The
    pool grows past ``n_primes`` until the subgroup has order h.
    """
    forms = enumerate_reduced(D)
    h = len(forms)
    one = principal_form(D)
    if h == 1:
        return ClassGroup(D, 1, (), ())
    table = {one: ()}
    gens: list[QuadForm] = []
    relations: list[list[int]] = []
    for ell in small_split_primes(D, 10**9):
        if len(table) == h:
            break
        g = prime_form(D, ell)
        if g in table and gens:
            continue
        y = g
        e = 1
        while y not in table:
            y = y * g
            e += 1
        if e == 1:
            continue
        k = len(gens)
        rel = [-c for c in table[y]] + [0] * (k - len(table[y])) + [e]
        relations = [row + [0] for row in relations]
        relations.append(rel)
        new = {}
        for x, coords in table.items():
            z = x
            for j in range(e):
                new[z] = coords + (0,) * (k - len(coords)) + (j,)
                z = z * g
        table = new
        gens.append(g)
    diag, V = _smith(relations)
    Vinv = _inverse_unimodular(V)
    divisors, new_gens = [], []
    for j, d in enumerate(diag):
        if d == 1:
            continue
        g = one
        for i, gi in enumerate(gens):
            if Vinv[j][i]:
                g = g * gi ** Vinv[j][i]
        divisors.append(d)
        new_gens.append(g)
    order = sorted(range(len(divisors)), key=lambda i: divisors[i])
    divisors = [divisors[i] for i in order]
    new_gens = [new_gens[i] for i in order]
    if math.prod(divisors) != h:
        raise ArithmeticError(f"structure {divisors} inconsistent with h = {h}")
    return ClassGroup(D, h, tuple(divisors), tuple(new_gens))
