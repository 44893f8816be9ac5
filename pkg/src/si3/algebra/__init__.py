"""Exact arithmetic: number field, polynomials, rational functions, parsing."""
from .field import ExtScalar, ZeroInverse, ext_inv, ext_mul, inv_by_matrix
from .poly import VARS, Poly, exact_div
from .ratfn import RatFn, common_denominator, ratfn_eq
from .parse import ParseError, parse_expr, parse_poly


def poly_diff(p, v):
    """Partial derivative of a Poly or RatFn with respect to a registry variable."""
    return p.diff(v)


__all__ = [
    "ExtScalar", "ZeroInverse", "ext_inv", "ext_mul", "inv_by_matrix",
    "VARS", "Poly", "exact_div", "RatFn", "common_denominator", "ratfn_eq",
    "ParseError", "parse_expr", "parse_poly", "poly_diff",
]
