from .hecke import (
    AL_ORIENTATION,
    EigenSplit,
    HeckeMatrix,
    al_split,
    atkin_lehner,
    charpoly_on,
    check_product,
    hecke_operator,
)
from .p1 import P1List, lift_to_sl2z, normalize
from .space import BudgetError, ModSymSpace, RationalMatrix, build_space, genus_x0

__all__ = [
    "AL_ORIENTATION",
    "BudgetError",
    "EigenSplit",
    "HeckeMatrix",
    "ModSymSpace",
    "P1List",
    "RationalMatrix",
    "al_split",
    "atkin_lehner",
    "build_space",
    "charpoly_on",
    "check_product",
    "genus_x0",
    "hecke_operator",
    "lift_to_sl2z",
    "normalize",
]
