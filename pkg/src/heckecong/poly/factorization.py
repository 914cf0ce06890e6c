from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from .dense import IntPoly, ModPoly

Poly = Union[IntPoly, ModPoly]


@dataclass(frozen=True)
class Factorization:
    """``unit * prod(factor**mult)`` with factors monic (F_p) or primitive
    with positive leading coefficient (Z).

    ``unresolved`` lists the positions of factors over Z that were neither
    split further nor certified irreducible.
    """

    base: Poly
    unit: int
    factors: tuple[tuple[Poly, int], ...]
    unresolved: frozenset[int] = field(default_factory=frozenset)

    def expand(self) -> Poly:
        if isinstance(self.base, ModPoly):
            acc = ModPoly(self.base.modulus, (self.unit,))
        else:
            acc = IntPoly((self.unit,))
        for g, m in self.factors:
            acc = acc * g**m
        return acc

    def verify(self) -> bool:
        return self.expand() == self.base

    @property
    def certified(self) -> bool:
        return not self.unresolved

    def degrees(self) -> list[int]:
        """Degrees with multiplicity, descending."""
        out = []
        for g, m in self.factors:
            out.extend([g.degree] * m)
        return sorted(out, reverse=True)

    def largest_degree(self) -> int:
        return max((g.degree for g, _ in self.factors), default=0)

    def largest_certified_degree(self) -> int:
        return max(
            (g.degree for i, (g, _) in enumerate(self.factors) if i not in self.unresolved),
            default=0,
        )

    def __iter__(self):
        return iter(self.factors)

    def __len__(self) -> int:
        return len(self.factors)
