"""
Symbolic Differentiation
========================
Bridges parsed expression trees and SymPy. Provides exact gradients,
Laplacians and Hessians, compiled to vectorised NumPy callables so every
downstream module evaluates V, grad V and Laplacian V consistently.
"""

import logging
from fractions import Fraction
from typing import List, Sequence, Tuple

import numpy as np
import sympy as sp

from .parser import (
    BinaryOp,
    Call,
    DimensionMismatchError,
    Negate,
    Node,
    Number,
    PotentialExpr,
    Power,
    Variable,
)

logger = logging.getLogger(__name__)


class NotRepresentableError(ValueError):
    """Raised when a symbolic result has no form in the expression grammar"""


_SYMPY_FUNCTIONS = {
    'sin': sp.sin,
    'cos': sp.cos,
    'exp': sp.exp,
    'sinh': sp.sinh,
    'cosh': sp.cosh,
    'tanh': sp.tanh,
    'sqrt': sp.sqrt,
    'abs': sp.Abs,
}

_GRAMMAR_FUNCTIONS = {
    sp.sin: 'sin',
    sp.cos: 'cos',
    sp.exp: 'exp',
    sp.sinh: 'sinh',
    sp.cosh: 'cosh',
    sp.tanh: 'tanh',
    sp.Abs: 'abs',
}


def coordinate_symbols(dim: int) -> Tuple[sp.Symbol, ...]:
    """Real symbols x1..xd"""
    return tuple(sp.Symbol(f"x{i}", real=True) for i in range(1, dim + 1))


def to_sympy(node: Node, dim: int) -> sp.Expr:
    """Convert an expression tree into an exact SymPy expression"""
    symbols = coordinate_symbols(dim)

    def convert(current: Node) -> sp.Expr:
        if isinstance(current, Number):
            fraction = Fraction(repr(float(current.value)))
            return sp.Rational(fraction.numerator, fraction.denominator)
        if isinstance(current, Variable):
            return symbols[current.index - 1]
        if isinstance(current, Negate):
            return -convert(current.operand)
        if isinstance(current, BinaryOp):
            left, right = convert(current.left), convert(current.right)
            if current.op == '+':
                return left + right
            if current.op == '-':
                return left - right
            if current.op == '*':
                return left * right
            return left / right
        if isinstance(current, Power):
            return convert(current.base) ** sp.Integer(current.exponent)
        if isinstance(current, Call):
            return _SYMPY_FUNCTIONS[current.func](convert(current.argument))
        raise TypeError(f"not an expression node: {current!r}")

    return convert(node)


def from_sympy(expression: sp.Expr, dim: int, source: str = '') -> PotentialExpr:
    """
    Convert a SymPy expression back into the expression grammar.

    sign(u) is written as u/abs(u) and DiracDelta terms are dropped; both
    add a non-smooth warning to the result.

    Raises:
        NotRepresentableError: The expression uses constructs outside the grammar
    """
    warnings: List[str] = []
    symbol_index = {symbol.name: i + 1 for i, symbol in enumerate(coordinate_symbols(dim))}

    def number(value: float) -> Node:
        if not np.isfinite(value):
            raise NotRepresentableError(f"non-finite constant {value}")
        return Negate(Number(-value)) if value < 0 else Number(value)

    def convert(current: sp.Expr) -> Node:
        if current.is_number:
            value = complex(current)
            if value.imag != 0:
                raise NotRepresentableError(f"complex constant {current}")
            return number(value.real)
        if isinstance(current, sp.Symbol):
            if current.name not in symbol_index:
                raise NotRepresentableError(f"unknown symbol {current.name}")
            return Variable(symbol_index[current.name])
        if isinstance(current, sp.Add):
            terms = current.as_ordered_terms()
            node = convert(terms[0])
            for term in terms[1:]:
                if term.could_extract_minus_sign():
                    node = BinaryOp('-', node, convert(-term))
                else:
                    node = BinaryOp('+', node, convert(term))
            return node
        if isinstance(current, sp.Mul):
            if current.could_extract_minus_sign():
                return Negate(convert(-current))
            numerator, denominator = sp.fraction(current)
            if denominator != 1:
                return BinaryOp('/', convert(numerator), convert(denominator))
            factors = current.as_ordered_factors()
            node = convert(factors[0])
            for factor in factors[1:]:
                node = BinaryOp('*', node, convert(factor))
            return node
        if isinstance(current, sp.Pow):
            base, exponent = current.args
            if exponent.is_Integer:
                return Power(convert(base), int(exponent))
            if exponent.is_Rational and exponent.q == 2:
                root = Call('sqrt', convert(base))
                return root if exponent.p == 1 else Power(root, int(exponent.p))
            raise NotRepresentableError(f"non-integer exponent in {current}")
        if isinstance(current, sp.sign):
            warnings.append("sign(u) rewritten as u/abs(u); undefined where u = 0")
            inner = convert(current.args[0])
            return BinaryOp('/', inner, Call('abs', inner))
        if isinstance(current, sp.DiracDelta):
            warnings.append("distributional DiracDelta term dropped")
            return Number(0.0)
        if current.func in _GRAMMAR_FUNCTIONS:
            return Call(_GRAMMAR_FUNCTIONS[current.func], convert(current.args[0]))
        raise NotRepresentableError(f"no grammar form for {current.func.__name__}")

    ast = convert(sp.sympify(expression))
    return PotentialExpr(ast=ast, dim=dim, source=source, warnings=tuple(warnings))


def _drop_distributions(expression: sp.Expr) -> sp.Expr:
    return expression.replace(sp.DiracDelta, lambda *args: sp.S.Zero)


class ScalarField:
    """
    Compiled scalar field with exact derivatives.

    All callables accept a point of shape (d,) or a batch of shape (..., d)
    and return arrays of shape (...), (..., d) or (..., d, d).
    """

    def __init__(self, expr: PotentialExpr, include_shift: bool = False):
        self.expr = expr
        self.dim = expr.dim
        self.symbols = coordinate_symbols(expr.dim)

        value = to_sympy(expr.ast, expr.dim)
        if include_shift and expr.lower_bound_shift:
            value = value + sp.Float(expr.lower_bound_shift)

        self.value_expr: sp.Expr = value
        self.gradient_exprs: Tuple[sp.Expr, ...] = tuple(sp.diff(value, x) for x in self.symbols)
        self.hessian_exprs: Tuple[Tuple[sp.Expr, ...], ...] = tuple(
            tuple(_drop_distributions(sp.diff(g, x)) for x in self.symbols)
            for g in self.gradient_exprs
        )
        self.laplacian_expr: sp.Expr = sp.Add(*(self.hessian_exprs[i][i] for i in range(self.dim)))

        self._value = self._compile(value)
        self._gradient = [self._compile(g) for g in self.gradient_exprs]
        self._hessian = [[self._compile(h) for h in row] for row in self.hessian_exprs]
        self._laplacian = self._compile(self.laplacian_expr)

    @property
    def warnings(self) -> Tuple[str, ...]:
        return self.expr.warnings

    @property
    def is_c2(self) -> bool:
        return self.expr.is_c2

    def _compile(self, expression: sp.Expr):
        return sp.lambdify(self.symbols, _drop_distributions(expression), modules='numpy')

    def _coordinates(self, point) -> Tuple[np.ndarray, Tuple[int, ...]]:
        points = np.asarray(point, dtype=float)
        if points.ndim == 0 or points.shape[-1] != self.dim:
            raise DimensionMismatchError(
                f"expected points with trailing dimension {self.dim}, got shape {points.shape}"
            )
        return points, points.shape[:-1]

    def _apply(self, function, points: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
        result = function(*(points[..., i] for i in range(self.dim)))
        return np.broadcast_to(np.asarray(result, dtype=float), shape).copy()

    def value(self, point) -> np.ndarray:
        points, shape = self._coordinates(point)
        return self._apply(self._value, points, shape)

    def gradient(self, point) -> np.ndarray:
        points, shape = self._coordinates(point)
        return np.stack([self._apply(g, points, shape) for g in self._gradient], axis=-1)

    def laplacian(self, point) -> np.ndarray:
        points, shape = self._coordinates(point)
        return self._apply(self._laplacian, points, shape)

    def hessian(self, point) -> np.ndarray:
        points, shape = self._coordinates(point)
        rows = [
            np.stack([self._apply(h, points, shape) for h in row], axis=-1)
            for row in self._hessian
        ]
        return np.stack(rows, axis=-2)

    def __call__(self, point) -> np.ndarray:
        return self.value(point)


def differentiate(expr: PotentialExpr, include_shift: bool = False) -> ScalarField:
    """
    Build the compiled field with symbolic gradient and Laplacian.

    SymPy folds constants and elides zero terms on construction, so the
    derivative trees of V and V + alpha coincide.

    Args:
        expr: Parsed potential
        include_shift: Add expr.lower_bound_shift to the value

    Returns:
        ScalarField
    """
    if not expr.is_c2:
        logger.warning(f"differentiating non-smooth expression {expr}: {'; '.join(expr.warnings)}")
    return ScalarField(expr, include_shift=include_shift)


def box_sample_points(extents: Sequence[Tuple[float, float]], points_per_axis: int) -> np.ndarray:
    """Tensor grid over a box, shape (points_per_axis**d, d)"""
    axes = [np.linspace(lo, hi, points_per_axis) for lo, hi in extents]
    mesh = np.meshgrid(*axes, indexing='ij')
    return np.stack([m.ravel() for m in mesh], axis=-1)


def estimate_lower_bound_shift(
    expr: PotentialExpr,
    extents: Sequence[Tuple[float, float]],
    points_per_axis: int = 65,
) -> PotentialExpr:
    """
    Sample V on the working box and set the lower-bound shift.

    The shift is 0 when the sampled minimum is non-negative and
    -min + 1e-9 otherwise. This is a sampling heuristic, not a global bound.

    Args:
        expr: Parsed potential
        extents: Per-axis (lo, hi) of the working box
        points_per_axis: Sampling resolution

    Returns:
        Copy of expr with lower_bound_shift set
    """
    if len(extents) != expr.dim:
        raise DimensionMismatchError(f"box has {len(extents)} axes, expression has dimension {expr.dim}")
    values = differentiate(expr).value(box_sample_points(extents, points_per_axis))
    if not np.all(np.isfinite(values)):
        raise ValueError(f"potential {expr} is not finite on the working box")
    minimum = float(values.min())
    alpha = 0.0 if minimum >= 0 else -minimum + 1e-9
    logger.info(f"sampled min of {expr} is {minimum:.6g}; lower_bound_shift = {alpha:.6g}")
    return expr.with_shift(alpha)


