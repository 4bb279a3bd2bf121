"""
Drift Transform
===============
Under v = e^{-f} u the drift equation du/dt = Laplacian u - 2 grad f . grad u - V u
becomes a Schroedinger equation with effective potential

    V~ = |grad f|^2 - Laplacian f + V.
"""

import logging

import sympy as sp

from modules.expr import DimensionMismatchError, PotentialExpr, differentiate, from_sympy, to_sympy

logger = logging.getLogger(__name__)


def is_zero_drift(f: PotentialExpr) -> bool:
    """True when f simplifies to the constant 0"""
    return to_sympy(f.ast, f.dim) == 0


def drift_transform(f: PotentialExpr, V: PotentialExpr) -> PotentialExpr:
    """
    Effective potential of the drift equation.

    Args:
        f: Drift potential (C4 in practice: polynomial or analytic primitives)
        V: Potential

    Returns:
        V~ as a PotentialExpr; V itself when f is identically zero.
        Non-smoothness warnings of f and V are carried over.
    """
    if f.dim != V.dim:
        raise DimensionMismatchError(f"drift has dimension {f.dim}, potential has {V.dim}")
    if is_zero_drift(f):
        return V

    drift = differentiate(f)
    squared_gradient = sp.Add(*(g ** 2 for g in drift.gradient_exprs))
    effective = sp.expand(squared_gradient - drift.laplacian_expr + to_sympy(V.ast, V.dim))
    source = f"|grad({f.source or f})|^2 - lap({f.source or f}) + ({V.source or V})"
    converted = from_sympy(effective, V.dim, source=source)

    warnings = tuple(f.warnings) + tuple(V.warnings) + tuple(converted.warnings)
    if not f.is_c2:
        warnings += (f"drift {f} is not C2; the effective potential may be discontinuous",)
    logger.info(f"effective potential for drift {f}: {effective}")
    return PotentialExpr(ast=converted.ast, dim=V.dim, source=source, warnings=warnings)
