"""Prime-field and univariate polynomial arithmetic."""

from .field import BUILTIN_PRIMES, FieldConfig, FieldElement, select_field
from .kernels import OpCounter, counting
from .poly import (
    NEG_INF,
    Poly,
    min_nonzero_degree,
    poly_divmod,
    poly_eval,
    poly_eval_many,
    poly_exact_div,
    poly_gcd,
    poly_interpolate,
    poly_monic,
    poly_mul,
)

__all__ = [
    "BUILTIN_PRIMES",
    "FieldConfig",
    "FieldElement",
    "NEG_INF",
    "OpCounter",
    "Poly",
    "counting",
    "min_nonzero_degree",
    "poly_divmod",
    "poly_eval",
    "poly_eval_many",
    "poly_exact_div",
    "poly_gcd",
    "poly_interpolate",
    "poly_monic",
    "poly_mul",
    "select_field",
]
