"""Exact polynomial arithmetic and ideal theory over QQ or GF(p)."""

from .field import GF, QQ, PrimeField, RationalField, UnluckyPrime, field_from_string
from .groebner import groebner_basis, normal_form, set_groebner_cache
from .ideals import (
    Ideal,
    eliminate,
    groebner,
    ideal_quotient,
    intersect,
    intersect_all,
    krull_dim,
    local_multiplicity,
    maximal_ideal,
    minor_ideal,
    point_on,
    saturate,
    standard_monomials,
    unit_ideal,
    vs_dim,
    zero_dim_radical,
)
from .polynomial import (
    GREVLEX,
    LEX,
    MonomialOrder,
    Poly,
    PolynomialSyntaxError,
    Ring,
    elimination_order,
    format_polynomial,
    parse_polynomial,
)

__all__ = [
    "GF", "QQ", "PrimeField", "RationalField", "UnluckyPrime", "field_from_string",
    "groebner_basis", "normal_form", "set_groebner_cache",
    "Ideal", "eliminate", "groebner", "ideal_quotient", "intersect", "intersect_all", "krull_dim",
    "local_multiplicity", "maximal_ideal", "minor_ideal", "point_on", "saturate",
    "standard_monomials", "unit_ideal", "vs_dim", "zero_dim_radical",
    "GREVLEX", "LEX", "MonomialOrder", "Poly", "PolynomialSyntaxError", "Ring",
    "elimination_order", "format_polynomial", "parse_polynomial",
]
