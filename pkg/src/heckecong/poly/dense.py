"""Dense univariate polynomials over Z and over prime fields.

Coefficients are stored in ascending degree order with trailing zeros
stripped, so the zero polynomial has an empty coefficient tuple.
"""

from __future__ import annotations

import json
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _gf


def _strip(coeffs: Iterable[int]) -> tuple[int, ...]:
    c = list(coeffs)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def _term(c: int, k: int) -> str:
    if k == 0:
        return str(abs(c))
    mono = "X" if k == 1 else f"X^{k}"
    return mono if abs(c) == 1 else f"{abs(c)}*{mono}"


def _format(coeffs: Sequence[int]) -> str:
    if not coeffs:
        return "0"
    parts = []
    for k in range(len(coeffs) - 1, -1, -1):
        c = coeffs[k]
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        if not parts:
            parts.append(("-" if c < 0 else "") + _term(c, k))
        else:
            parts.append(f" {sign} " + _term(c, k))
    return "".join(parts)


@dataclass(frozen=True)
class IntPoly:
    """Polynomial with arbitrary-precision integer coefficients."""

    coeffs: tuple[int, ...]

    def __init__(self, coeffs: Iterable[int] = ()):
        object.__setattr__(self, "coeffs", _strip(int(c) for c in coeffs))

    @classmethod
    def x(cls) -> IntPoly:
        return cls((0, 1))

    @classmethod
    def constant(cls, c: int) -> IntPoly:
        return cls((c,))

    @classmethod
    def from_roots(cls, roots: Iterable[int]) -> IntPoly:
        f = cls((1,))
        for r in roots:
            f = f * cls((-r, 1))
        return f

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lc(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_monic(self) -> bool:
        return self.lc == 1

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __len__(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, k: int) -> int:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0

    def __repr__(self) -> str:
        return f"IntPoly({_format(self.coeffs)})"

    def __str__(self) -> str:
        return _format(self.coeffs)

    def __neg__(self) -> IntPoly:
        return IntPoly(-c for c in self.coeffs)

    def __add__(self, other: IntPoly | int) -> IntPoly:
        other = _as_intpoly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return IntPoly(self[k] + other[k] for k in range(n))

    __radd__ = __add__

    def __sub__(self, other: IntPoly | int) -> IntPoly:
        return self + (-_as_intpoly(other))

    def __rsub__(self, other: int) -> IntPoly:
        return _as_intpoly(other) - self

    def __mul__(self, other: IntPoly | int) -> IntPoly:
        if isinstance(other, int):
            return IntPoly(c * other for c in self.coeffs)
        return IntPoly(_int_convolve(self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def __pow__(self, e: int) -> IntPoly:
        result = IntPoly((1,))
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def divmod_exact(self, other: IntPoly) -> tuple[IntPoly, IntPoly]:
        """Division by a polynomial whose leading coefficient is a unit
        or divides every intermediate leading term.

        Raises ``ArithmeticError`` if a non-integral quotient coefficient
        would arise.
        """
        if not other:
            raise ZeroDivisionError("polynomial division by zero")
        r = list(self.coeffs)
        db = other.degree
        lb = other.lc
        q = [0] * max(len(r) - db, 0)
        for i in range(len(r) - 1 - db, -1, -1):
            c = r[i + db]
            if c == 0:
                continue
            qi, rem = divmod(c, lb)
            if rem:
                raise ArithmeticError("non-integral quotient")
            q[i] = qi
            for j, b in enumerate(other.coeffs):
                r[i + j] -= qi * b
        return IntPoly(q), IntPoly(r)

    def __floordiv__(self, other: IntPoly) -> IntPoly:
        return self.divmod_exact(other)[0]

    def __mod__(self, other: IntPoly) -> IntPoly:
        return self.divmod_exact(other)[1]

    def divides(self, other: IntPoly) -> bool:
        """True iff ``self`` divides ``other`` in Z[X]."""
        try:
            _, r = other.divmod_exact(self)
        except ArithmeticError:
            return False
        return not r

    def derivative(self) -> IntPoly:
        return IntPoly(k * c for k, c in enumerate(self.coeffs) if k)

    def content(self) -> int:
        from math import gcd

        g = 0
        for c in self.coeffs:
            g = gcd(g, c)
        return g

    def primitive(self) -> IntPoly:
        g = self.content()
        if g == 0:
            return self
        if self.lc < 0:
            g = -g
        return IntPoly(c // g for c in self.coeffs)

    def norm_inf(self) -> int:
        return max((abs(c) for c in self.coeffs), default=0)

    def norm2_sq(self) -> int:
        return sum(c * c for c in self.coeffs)

    def to_json(self) -> str:
        return json.dumps([str(c) for c in self.coeffs])

    @classmethod
    def from_json(cls, text: str) -> IntPoly:
        return cls(int(c) for c in json.loads(text))


@dataclass(frozen=True)
class ModPoly:
    """Polynomial over the prime field F_p, coefficients in [0, p)."""

    modulus: int
    coeffs: tuple[int, ...]

    def __init__(self, modulus: int, coeffs: Iterable[int] = ()):
        if modulus < 2:
            raise ValueError(f"modulus must be prime, got {modulus}")
        object.__setattr__(self, "modulus", int(modulus))
        object.__setattr__(self, "coeffs", _strip(int(c) % modulus for c in coeffs))

    @classmethod
    def from_array(cls, p: int, a: np.ndarray) -> ModPoly:
        return cls(p, (int(c) for c in a))

    def array(self) -> np.ndarray:
        return _gf.asarray(self.coeffs, self.modulus)

    @classmethod
    def x(cls, p: int) -> ModPoly:
        return cls(p, (0, 1))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lc(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __getitem__(self, k: int) -> int:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0

    def __repr__(self) -> str:
        return f"ModPoly({_format(self.coeffs)} mod {self.modulus})"

    def __str__(self) -> str:
        return _format(self.coeffs)

    def _check(self, other: ModPoly) -> None:
        if other.modulus != self.modulus:
            raise ValueError("moduli differ")

    def __add__(self, other: ModPoly) -> ModPoly:
        self._check(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return ModPoly(self.modulus, (self[k] + other[k] for k in range(n)))

    def __neg__(self) -> ModPoly:
        return ModPoly(self.modulus, (-c for c in self.coeffs))

    def __sub__(self, other: ModPoly) -> ModPoly:
        return self + (-other)

    def __mul__(self, other: ModPoly | int) -> ModPoly:
        p = self.modulus
        if isinstance(other, int):
            return ModPoly(p, (c * other for c in self.coeffs))
        self._check(other)
        return ModPoly.from_array(p, _gf.mul(self.array(), other.array(), p))

    __rmul__ = __mul__

    def __pow__(self, e: int) -> ModPoly:
        result = ModPoly(self.modulus, (1,))
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __divmod__(self, other: ModPoly) -> tuple[ModPoly, ModPoly]:
        self._check(other)
        p = self.modulus
        q, r = _gf.divmod_(self.array(), other.array(), p)
        return ModPoly.from_array(p, q), ModPoly.from_array(p, r)

    def __floordiv__(self, other: ModPoly) -> ModPoly:
        return divmod(self, other)[0]

    def __mod__(self, other: ModPoly) -> ModPoly:
        return divmod(self, other)[1]

    def __call__(self, x: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = (acc * x + c) % self.modulus
        return acc

    def monic(self) -> ModPoly:
        if not self.coeffs or self.lc == 1:
            return self
        inv = pow(self.lc, -1, self.modulus)
        return ModPoly(self.modulus, (c * inv for c in self.coeffs))

    def gcd(self, other: ModPoly) -> ModPoly:
        self._check(other)
        p = self.modulus
        return ModPoly.from_array(p, _gf.gcd(self.array(), other.array(), p))

    def derivative(self) -> ModPoly:
        return ModPoly(self.modulus, (k * c for k, c in enumerate(self.coeffs) if k))

    def lift(self) -> IntPoly:
        """Symmetric lift to Z[X], coefficients in (-p/2, p/2]."""
        p = self.modulus
        return IntPoly(c - p if c > p // 2 else c for c in self.coeffs)

    def to_json(self) -> str:
        return json.dumps({"modulus": self.modulus, "coefficients": [str(c) for c in self.coeffs]})

    @classmethod
    def from_json(cls, text: str) -> ModPoly:
        obj = json.loads(text)
        return cls(int(obj["modulus"]), (int(c) for c in obj["coefficients"]))


def _as_intpoly(v: IntPoly | int) -> IntPoly:
    if isinstance(v, IntPoly):
        return v
    if isinstance(v, (int, np.integer)):
        return IntPoly((int(v),))
    raise TypeError(f"cannot coerce {type(v).__name__} to IntPoly")


def _int_convolve(a: Sequence[int], b: Sequence[int]) -> list[int]:
    if not a or not b:
        return []
    if len(a) < len(b):
        a, b = b, a
    out = [0] * (len(a) + len(b) - 1)
    for j, bj in enumerate(b):
        if bj:
            for i, ai in enumerate(a):
                out[i + j] += ai * bj
    return out


def reduce_mod(f: IntPoly, p: int) -> ModPoly:
    """Coefficient-wise reduction of an integer polynomial modulo ``p``."""
    return ModPoly(p, f.coeffs)


def poly_divides_mod_p(g: ModPoly, f: ModPoly) -> bool:
    """True iff ``g`` divides ``f`` in F_p[X]."""
    if not g:
        raise ZeroDivisionError("divisor must be nonzero")
    return not (f % g)


def rational_poly_to_int(coeffs: Sequence[Fraction]) -> IntPoly:
    """Convert rational coefficients that are known to be integral."""
    out = []
    for c in coeffs:
        c = Fraction(c)
        if c.denominator != 1:
            raise ArithmeticError(f"coefficient {c} is not integral")
        out.append(c.numerator)
    return IntPoly(out)
