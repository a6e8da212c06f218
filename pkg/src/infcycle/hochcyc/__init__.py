"""Hochschild and cyclic homology of finite-dimensional commutative algebras."""

from .bar import DEFAULT_BUDGET, BarComplex, BudgetError, bar
from .eulerian import antisymmetrizer, check_idempotents, eulerian_idempotents, shuffle_element
from .homology import (
    GoodwillieResult,
    HodgeDecomposition,
    HomologyResult,
    SBIReport,
    TruncationError,
    goodwillie_k,
    hc,
    hh,
    hodge,
    idempotents_commute,
    relative,
    relative_additivity,
    sbi_split_check,
)
