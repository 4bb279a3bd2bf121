"""
Expression Module
=================
Potential and drift expressions for the Harnack toolkit.

This module handles:
1. Parsing the arithmetic expression language over x1..xd
2. Canonical printing (parse, print, parse is a fixed point)
3. Exact symbolic gradients, Laplacians and Hessians via SymPy
4. Sampling-based lower-bound shift of a potential on a box
"""

from .parser import (
    DimensionMismatchError,
    ExpressionSyntaxError,
    PotentialExpr,
    collect_variables,
    parse,
    to_source,
)
from .symbolic import (
    NotRepresentableError,
    ScalarField,
    box_sample_points,
    coordinate_symbols,
    differentiate,
    estimate_lower_bound_shift,
    from_sympy,
    to_sympy,
)

__all__ = [
    'PotentialExpr',
    'ScalarField',
    'ExpressionSyntaxError',
    'DimensionMismatchError',
    'NotRepresentableError',
    'parse',
    'to_source',
    'collect_variables',
    'differentiate',
    'estimate_lower_bound_shift',
    'to_sympy',
    'from_sympy',
    'coordinate_symbols',
    'box_sample_points',
]
