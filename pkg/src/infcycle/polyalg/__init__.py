"""Polynomials over Q, Groebner bases, and finite-dimensional quotient algebras."""

from .poly import Poly, format_poly, order_key
from .parse import PolyParseError, parse_poly, parse_rational, split_list
from .groebner import (
    Membership,
    PolyContext,
    buchberger,
    colon_ideal,
    exact_divide,
    hilbert_numerator,
    intersect_ideals,
    reduce_full,
)
from .artin import (
    AlgebraMap,
    ArtinAlgebra,
    RelativePair,
    algebra,
    catalog,
    quotient_algebra,
    rational_field,
    tensor_pair,
    truncated,
)
from .regular import RegularityReport, is_regular_sequence
