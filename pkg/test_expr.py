#!/usr/bin/env python3
"""
Test Expression Module
======================
Parsing, canonical printing and symbolic derivatives of potentials.
"""

import sys
import logging
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis.strategies import floats, lists, sampled_from

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent))

from modules.expr import (
    DimensionMismatchError,
    ExpressionSyntaxError,
    differentiate,
    estimate_lower_bound_shift,
    from_sympy,
    parse,
    to_source,
    to_sympy,
)
from modules.expr.parser import BinaryOp, Number, Power, Variable

logging.basicConfig(level=logging.INFO, format='%(message)s')
logger = logging.getLogger(__name__)


SMOOTH_SOURCES = [
    ('x1^2', 1),
    ('sin(x1) + 2', 1),
    ('exp(-x1^2/4) * cosh(x1/3)', 1),
    ('x1^2 + x2^2', 2),
    ('sin(x1)*cos(x2) + 2', 2),
    ('tanh(x1) + x1*x2^3/50', 2),
    ('(x1 - 0.5)^2 + sinh(x2/5) - 3*x3', 3),
]


def coordinates(dim):
    return lists(floats(min_value=-5, max_value=5, allow_nan=False), min_size=dim, max_size=dim)


# ---------------------------------------------------------------------------
# parse
# ---------------------------------------------------------------------------

def test_parse_quadratic():
    expr = parse('x1^2', 1)
    assert expr.ast == Power(Variable(1), 2)
    assert expr.dim == 1
    assert expr.lower_bound_shift == 0.0
    assert expr.is_c2


def test_parse_two_dimensional_quadratic():
    expr = parse('x1^2 + x2^2', 2)
    assert expr.ast == BinaryOp('+', Power(Variable(1), 2), Power(Variable(2), 2))


def test_parse_reports_offset_of_missing_operand():
    with pytest.raises(ExpressionSyntaxError) as excinfo:
        parse('x1 +', 1)
    assert excinfo.value.position == 4


@pytest.mark.parametrize("source, position", [
    ('x1 * * 2', 5),
    ('sin x1', 4),
    ('(x1 + 2', 7),
    ('x1^2.5', 3),
    ('x1 $ 2', 3),
    ('y + 1', 0),
    ('x1 2', 3),
])
def test_parse_syntax_errors(source, position):
    with pytest.raises(ExpressionSyntaxError) as excinfo:
        parse(source, 1)
    assert excinfo.value.position == position


def test_unknown_identifier_is_rejected():
    with pytest.raises(ExpressionSyntaxError, match='unknown identifier'):
        parse('log(x1)', 1)


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        parse('x1 + x3', 2)


def test_lower_dimensional_expression_in_higher_dimension():
    expr = parse('x1^2', 3)
    assert expr.max_variable_index == 1
    field = differentiate(expr)
    assert field.gradient([1.0, 2.0, 3.0]).tolist() == [2.0, 0.0, 0.0]


def test_precedence_and_unary_minus():
    expr = parse('-x1^2 + 2*x1/4', 1)
    field = differentiate(expr)
    assert float(field.value([3.0])) == pytest.approx(-9.0 + 1.5)


def test_negative_integer_exponent():
    field = differentiate(parse('(1 + x1^2)^-1', 1))
    assert float(field.value([1.0])) == pytest.approx(0.5)


def test_non_smooth_primitives_are_flagged():
    expr = parse('abs(x1) + sqrt(x1^2 + 1)', 1)
    assert not expr.is_c2
    assert len(expr.warnings) == 2
    assert 'abs' in expr.warnings[0]


# ---------------------------------------------------------------------------
# canonical printing
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("source, dim", SMOOTH_SOURCES + [('-(-x1)^-2 + abs(x1 - 1e-3)', 1)])
def test_parse_print_parse_fixed_point(source, dim):
    first = parse(source, dim)
    printed = to_source(first.ast)
    second = parse(printed, dim)
    assert second.ast == first.ast
    assert to_source(second.ast) == printed


def test_canonical_form_is_parenthesised():
    assert to_source(parse('x1 + 2*x2', 2).ast) == '(x1 + (2.0 * x2))'


# ---------------------------------------------------------------------------
# differentiate
# ---------------------------------------------------------------------------

def test_quadratic_derivatives():
    field = differentiate(parse('x1^2', 1))
    assert field.gradient([1.5]).tolist() == [3.0]
    assert float(field.laplacian([1.5])) == 2.0
    assert str(field.laplacian_expr) == '2'


def test_two_dimensional_laplacian_is_constant():
    field = differentiate(parse('x1^2 + x2^2', 2))
    points = np.random.default_rng(3).uniform(-5, 5, size=(10, 2))
    assert np.allclose(field.laplacian(points), 4.0, atol=1e-12)


def test_sin_laplacian_bounded_by_one():
    field = differentiate(parse('sin(x1) + 2', 1))
    xs = np.linspace(-5, 5, 401)[:, None]
    assert np.allclose(field.laplacian(xs), -np.sin(xs[:, 0]))
    assert field.laplacian(xs).max() <= 1.0


def test_evaluation_is_deterministic():
    field = differentiate(parse('sin(x1)*exp(x2) + x1*x2', 2))
    point = np.array([0.3, -1.7])
    assert field.value(point).tobytes() == field.value(point.copy()).tobytes()


def test_batch_shapes():
    field = differentiate(parse('x1^2 + 3', 2))
    batch = np.zeros((4, 5, 2))
    assert field.value(batch).shape == (4, 5)
    assert field.gradient(batch).shape == (4, 5, 2)
    assert field.hessian(batch).shape == (4, 5, 2, 2)
    assert np.all(field.value(batch) == 3.0)


def test_shift_invariance_of_derivative_trees():
    base = differentiate(parse('sin(x1)*x2 + x1^2', 2))
    shifted = differentiate(parse('sin(x1)*x2 + x1^2 + 7.25', 2))
    assert base.gradient_exprs == shifted.gradient_exprs
    assert base.laplacian_expr == shifted.laplacian_expr


def test_include_shift_adds_constant():
    expr = parse('x1^2 - 1', 1).with_shift(1.5)
    assert float(differentiate(expr, include_shift=True).value([0.0])) == pytest.approx(0.5)
    assert float(differentiate(expr).value([0.0])) == pytest.approx(-1.0)


@settings(max_examples=100, deadline=None)
@given(sampled_from(SMOOTH_SOURCES), coordinates(3))
def test_gradient_matches_central_differences(case, coords):
    source, dim = case
    field = differentiate(parse(source, dim))
    point = np.array(coords[:dim])
    h = 1e-5
    gradient = field.gradient(point)
    for i in range(dim):
        step = np.zeros(dim)
        step[i] = h
        difference = (field.value(point + step) - field.value(point - step)) / (2 * h)
        assert abs(gradient[i] - difference) <= 1e-6 * (1 + np.linalg.norm(gradient))


@settings(max_examples=100, deadline=None)
@given(sampled_from(SMOOTH_SOURCES), coordinates(3))
def test_laplacian_matches_central_differences(case, coords):
    source, dim = case
    field = differentiate(parse(source, dim))
    point = np.array(coords[:dim])
    h = 1e-4
    centre = field.value(point)
    total = 0.0
    for i in range(dim):
        step = np.zeros(dim)
        step[i] = h
        total += (field.value(point + step) - 2 * centre + field.value(point - step)) / h**2
    assert abs(field.laplacian(point) - total) <= 1e-4 * (1 + abs(field.laplacian(point)))


# ---------------------------------------------------------------------------
# sympy bridge and shift estimate
# ---------------------------------------------------------------------------

def test_from_sympy_round_trip_values():
    expr = parse('x1^2*sin(x2) - 3/x1 + sqrt(x2^2 + 1)', 2)
    rebuilt = from_sympy(to_sympy(expr.ast, 2), 2)
    points = np.array([[0.7, -1.2], [2.5, 0.3]])
    assert np.allclose(differentiate(rebuilt).value(points), differentiate(expr).value(points))


def test_from_sympy_rewrites_sign():
    field = differentiate(parse('abs(x1)', 1))
    rebuilt = from_sympy(field.gradient_exprs[0], 1)
    assert any('sign' in warning for warning in rebuilt.warnings)
    assert float(differentiate(rebuilt).value([-2.0])) == -1.0


def test_literal_numbers_stay_non_negative():
    rebuilt = from_sympy(to_sympy(parse('x1 - 3', 1).ast, 1), 1)
    assert Number(-3.0) not in [rebuilt.ast.left, rebuilt.ast.right]


def test_lower_bound_shift_for_negative_potential():
    expr = estimate_lower_bound_shift(parse('x1^2 - 2', 1), [(-2.0, 2.0)])
    assert expr.lower_bound_shift == pytest.approx(2.0 + 1e-9)


def test_lower_bound_shift_zero_for_non_negative_potential():
    expr = estimate_lower_bound_shift(parse('sin(x1) + 2', 1), [(-5.0, 5.0)])
    assert expr.lower_bound_shift == 0.0
