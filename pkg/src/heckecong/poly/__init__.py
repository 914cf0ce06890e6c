from .charpoly import CharpolyError, charpoly_int_matrix, charpoly_mod_p
from .dense import IntPoly, ModPoly, poly_divides_mod_p, reduce_mod
from .factorization import Factorization
from .finite_field import (
    distinct_degree_profile,
    factor_mod_p,
    is_irreducible_mod_p,
    largest_irreducible_degree_mod_p,
)
from .integer import certify_irreducible, factor_over_Z, rational_roots, squarefree_decomposition

__all__ = [
    "CharpolyError",
    "Factorization",
    "IntPoly",
    "ModPoly",
    "certify_irreducible",
    "charpoly_int_matrix",
    "charpoly_mod_p",
    "distinct_degree_profile",
    "factor_mod_p",
    "factor_over_Z",
    "is_irreducible_mod_p",
    "largest_irreducible_degree_mod_p",
    "poly_divides_mod_p",
    "rational_roots",
    "reduce_mod",
    "squarefree_decomposition",
]
