#!/usr/bin/env python3
"""
Test Conditions Module
======================
Sampled hypothesis checks, ball geometry, boundary limits and rate pair
selection by comparison.
"""

import sys
import logging
from pathlib import Path

import numpy as np
import pytest

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent))

from modules.action import SolverOptions, TimeWindow, solve_geodesic
from modules.closedform import rate_pair_heat, rate_pair_power, rate_pair_quadratic
from modules.conditions import (
    ANALYTIC,
    ConditionId,
    HeatOmega,
    NumericOmega,
    QuadraticOmega,
    SampleSet,
    ShiftedOmega,
    Verdict,
    build_sample_set,
    check_beta_boundary_limits,
    check_boundary_normal,
    check_first_order,
    check_lemma_2_4,
    check_second_order,
    check_second_order_integral,
    check_v_convex_ball,
    comparison_select,
    provider_for,
    summarize,
)
from modules.expr import differentiate, parse

logging.basicConfig(level=logging.INFO, format='%(message)s')
logger = logging.getLogger(__name__)

EQUALITY = (Verdict.HOLDS_WITH_EQUALITY,)
PASSING = (Verdict.HOLDS, Verdict.HOLDS_WITH_EQUALITY)


def field(source, dim=1):
    return differentiate(parse(source, dim))


def samples(dim=1, points_per_axis=5, half_width=2.0):
    return build_sample_set([(-half_width, half_width)] * dim, points_per_axis=points_per_axis)


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

def test_summarize_violation_threshold():
    report = summarize(ConditionId.INEQ_1_10, [0.5, -2e-6, 0.1], [(1,), (2,), (3,)], ANALYTIC)
    assert report.verdict == Verdict.VIOLATED
    assert report.worst_residual == -2e-6
    assert report.worst_point == (2,)


def test_summarize_equality_and_holds():
    assert summarize(ConditionId.INEQ_1_10, [1e-9, -1e-9], [(), ()], ANALYTIC).verdict == Verdict.HOLDS_WITH_EQUALITY
    assert summarize(ConditionId.INEQ_1_10, [1e-9, 0.3], [(), ()], ANALYTIC).verdict == Verdict.HOLDS
    assert summarize(ConditionId.V_CONVEX_BALL, [0.0], [()], ANALYTIC, allow_equality=False).verdict == Verdict.HOLDS


def test_summarize_counts_failed_samples():
    report = summarize(ConditionId.INEQ_1_11, [0.2, np.nan, 0.1], [(), (), ()], ANALYTIC)
    assert report.inconclusive_count == 1
    assert report.verdict == Verdict.HOLDS
    assert summarize(ConditionId.INEQ_1_11, [np.nan], [()], ANALYTIC).verdict == Verdict.INCONCLUSIVE


def test_summarize_multimodal_is_inconclusive():
    report = summarize(ConditionId.INEQ_1_12, [0.0], [()], ANALYTIC, multimodal=True)
    assert report.verdict == Verdict.INCONCLUSIVE
    violated = summarize(ConditionId.INEQ_1_12, [-1.0], [()], ANALYTIC, multimodal=True)
    assert violated.verdict == Verdict.VIOLATED


def test_report_serialises():
    report = summarize(ConditionId.INEQ_1_10, [0.5], [(np.array([1.0]), np.array([0.0]), 1.0, 0.5)], ANALYTIC)
    payload = report.to_dict()
    assert payload['condition_id'] == 'ineq_1_10'
    assert payload['worst_point'] == [[1.0], [0.0], 1.0, 0.5]


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------

def test_sample_set_grid():
    sample_set = build_sample_set([(-1.0, 1.0)], points_per_axis=3)
    assert len(sample_set) == 3 * 3 * 12
    assert all(s.t - s.s >= 0.05 * s.t for s in sample_set)


def test_sample_set_subsample_is_seeded():
    first = build_sample_set([(-1.0, 1.0)] * 2, points_per_axis=4, max_samples=30, seed=7)
    second = build_sample_set([(-1.0, 1.0)] * 2, points_per_axis=4, max_samples=30, seed=7)
    assert len(first) == 30
    assert [s.as_tuple() for s in first] == [s.as_tuple() for s in second]


def test_sample_set_from_points_validates():
    with pytest.raises(ValueError):
        SampleSet.from_points([([0.0], [1.0], 0.5, 1.0)], dim=1)
    with pytest.raises(ValueError):
        SampleSet.from_points([([0.0, 1.0], [1.0], 1.0, 0.5)], dim=1)


def test_provider_for():
    assert provider_for('closed_heat', 1).name == 'closed_heat'
    assert provider_for('closed_quadratic', 2, C1=1.0).analytic
    assert not provider_for('numeric', 1, V=field('x1^2')).analytic
    with pytest.raises(ValueError):
        provider_for('closed_quadratic', 1)
    with pytest.raises(ValueError):
        provider_for('numeric', 1)
    with pytest.raises(ValueError):
        provider_for('tabulated', 1)


# ---------------------------------------------------------------------------
# First-order inequalities
# ---------------------------------------------------------------------------

@pytest.mark.parametrize('dim', [1, 2])
def test_first_order_heat_equality(dim):
    forward, backward = check_first_order(HeatOmega(dim), field('0', dim), samples(dim, 4))
    assert forward.condition_id == ConditionId.INEQ_1_10
    assert backward.condition_id == ConditionId.INEQ_1_11
    assert forward.verdict in EQUALITY
    assert backward.verdict in EQUALITY


@pytest.mark.parametrize('C1,C2', [(1.0, 0.0), (0.5, 1.5)])
def test_first_order_quadratic_equality(C1, C2):
    V = field(f'{C1 * C1!r}*x1^2 + {C2!r}')
    forward, backward = check_first_order(QuadraticOmega(1, C1, C2), V, samples())
    assert forward.verdict in EQUALITY
    assert backward.verdict in EQUALITY
    assert abs(forward.worst_residual) <= 1e-8


def test_first_order_shifted_provider():
    forward, backward = check_first_order(ShiftedOmega(HeatOmega(1), 2.0), field('2'), samples())
    assert forward.verdict in EQUALITY
    assert backward.verdict in EQUALITY


def test_first_order_numeric_sine():
    V = field('sin(x1) + 2')
    provider = NumericOmega(V, box_size=1.0)
    sample_set = build_sample_set([(-3.0, 3.0)], points_per_axis=8, max_samples=200, seed=0)
    forward, backward = check_first_order(provider, V, sample_set, jobs=4)
    assert forward.sample_count == 200
    for report in (forward, backward):
        assert report.verdict in PASSING
        assert report.worst_residual >= -1e-4


def test_first_order_detects_wrong_potential():
    forward, _ = check_first_order(HeatOmega(1), field('1'), samples())
    assert forward.verdict == Verdict.VIOLATED


# ---------------------------------------------------------------------------
# Second-order inequality
# ---------------------------------------------------------------------------

@pytest.mark.parametrize('dim', [1, 3])
def test_second_order_heat_equality(dim):
    report = check_second_order(HeatOmega(dim), rate_pair_heat(dim), samples(dim, 3))
    assert report.verdict in EQUALITY


@pytest.mark.parametrize('dim,C1', [(1, 1.0), (2, 0.7)])
def test_second_order_quadratic_equality(dim, C1):
    report = check_second_order(QuadraticOmega(dim, C1), rate_pair_quadratic(dim, C1), samples(dim, 3))
    assert report.verdict in EQUALITY
    assert abs(report.worst_residual) <= 1e-8


def test_second_order_flags_perturbed_pair():
    report = check_second_order(HeatOmega(2), rate_pair_power(2, 0.5), samples(2, 3))
    assert report.verdict == Verdict.VIOLATED


def test_second_order_stronger_exponent_holds():
    report = check_second_order(HeatOmega(1), rate_pair_power(1, 1.0), samples())
    assert report.verdict == Verdict.HOLDS


def test_second_order_numeric_heat():
    sample_set = build_sample_set([(-1.0, 1.0)], points_per_axis=3, times=(1.0,), s_fractions=(0.5,))
    report = check_second_order(NumericOmega(field('0')), rate_pair_heat(1), sample_set)
    assert report.verdict in EQUALITY


# ---------------------------------------------------------------------------
# Integral form and the geodesic lemma
# ---------------------------------------------------------------------------

def test_integral_heat_equality():
    geodesic = solve_geodesic([0.0], [1.0], TimeWindow(s=0.5, t=1.0), field('0'))
    report = check_second_order_integral(field('0'), rate_pair_heat(1), geodesic)
    assert report.condition_id == ConditionId.SECOND_ORDER_1_5
    assert report.verdict in EQUALITY


def test_integral_quadratic_equality():
    V = field('4*x1^2')
    geodesics = [solve_geodesic([y], [x], TimeWindow(s=s, t=t), V)
                 for y, x, s, t in [(0.0, 1.0, 0.5, 1.0), (-0.5, 0.2, 0.1, 0.6)]]
    report = check_second_order_integral(V, rate_pair_quadratic(1, 2.0), geodesics)
    assert report.verdict in EQUALITY


def test_integral_sine_holds_with_comparison_pair():
    V = field('sin(x1) + 2')
    geodesic = solve_geodesic([0.0], [1.0], TimeWindow(s=0.5, t=1.0), V)
    report = check_second_order_integral(V, rate_pair_quadratic(1, 1.0 / np.sqrt(2.0)), geodesic)
    assert report.verdict == Verdict.HOLDS


def test_integral_refuses_non_smooth_potential():
    V = field('abs(x1) + 1')
    geodesic = solve_geodesic([0.5], [1.0], TimeWindow(s=0.5, t=1.0), V)
    report = check_second_order_integral(V, rate_pair_quadratic(1, 1.0), geodesic)
    assert report.verdict == Verdict.INCONCLUSIVE


def test_lemma_heat():
    window = TimeWindow(s=0.5, t=1.0)
    geodesic = solve_geodesic([0.0], [1.0], window, field('0'))
    derivatives = HeatOmega(1).derivatives([1.0], [0.0], window.t, window.s, order=2)
    report = check_lemma_2_4(field('0'), rate_pair_heat(1), geodesic, derivatives)
    assert report.condition_id == ConditionId.LEMMA_2_4
    assert report.verdict in EQUALITY
    assert float(report.notes[0].split('=')[1]) == pytest.approx(0.25, rel=1e-9)


def test_lemma_quadratic():
    window = TimeWindow(s=0.5, t=1.0)
    V = field('x1^2')
    geodesic = solve_geodesic([0.2], [1.0], window, V)
    derivatives = QuadraticOmega(1, 1.0).derivatives([1.0], [0.2], window.t, window.s, order=2)
    report = check_lemma_2_4(V, rate_pair_quadratic(1, 1.0), geodesic, derivatives)
    assert report.verdict in EQUALITY
    assert abs(report.worst_residual) <= 1e-6


def test_lemma_sine_margin():
    window = TimeWindow(s=0.5, t=1.0)
    V = field('sin(x1) + 2')
    geodesic = solve_geodesic([0.0], [1.0], window, V)
    derivatives = NumericOmega(V).derivatives([1.0], [0.0], window.t, window.s, order=2)
    report = check_lemma_2_4(V, rate_pair_heat(1), geodesic, derivatives)
    assert report.verdict in PASSING
    assert any(note.startswith('margin=') for note in report.notes)


def test_lemma_covers_every_geodesic():
    window = TimeWindow(s=0.5, t=1.0)
    ends = [([0.0], [1.0]), ([0.5], [-1.0]), ([-1.0], [0.25])]
    geodesics = [solve_geodesic(y, x, window, field('0')) for y, x in ends]
    derivatives = [HeatOmega(1).derivatives(x, y, window.t, window.s, order=2) for y, x in ends]
    report = check_lemma_2_4(field('0'), rate_pair_heat(1), geodesics, derivatives)
    assert report.sample_count == 3
    assert report.verdict in EQUALITY
    assert report.notes[0].startswith('margin=')


def test_lemma_reports_violation_on_later_geodesic():
    window = TimeWindow(s=0.5, t=1.0)
    geodesics = [solve_geodesic([0.0], [1.0], window, field('0')),
                 solve_geodesic([0.5], [-1.0], window, field('0'))]
    # second derivatives taken over a window five times shorter: Laplacians five times larger
    derivatives = [HeatOmega(1).derivatives([1.0], [0.0], 1.0, 0.5, order=2),
                   HeatOmega(1).derivatives([-1.0], [0.5], 1.0, 0.9, order=2)]
    report = check_lemma_2_4(field('0'), rate_pair_heat(1), geodesics, derivatives)
    assert report.verdict == Verdict.VIOLATED
    assert report.worst_point[0] == pytest.approx([-1.0])


def test_lemma_failed_derivative_is_inconclusive_sample():
    window = TimeWindow(s=0.5, t=1.0)
    geodesics = [solve_geodesic([0.0], [1.0], window, field('0')),
                 solve_geodesic([0.5], [-1.0], window, field('0'))]
    derivatives = [HeatOmega(1).derivatives([1.0], [0.0], window.t, window.s, order=2), None]
    report = check_lemma_2_4(field('0'), rate_pair_heat(1), geodesics, derivatives)
    assert report.sample_count == 2
    assert report.inconclusive_count == 1
    assert report.verdict in EQUALITY


def test_lemma_rejects_misaligned_lists():
    window = TimeWindow(s=0.5, t=1.0)
    geodesic = solve_geodesic([0.0], [1.0], window, field('0'))
    with pytest.raises(ValueError):
        check_lemma_2_4(field('0'), rate_pair_heat(1), [geodesic, geodesic], [])


# ---------------------------------------------------------------------------
# Ball geometry
# ---------------------------------------------------------------------------

@pytest.mark.parametrize('radius', [0.5, 1.0, 2.0, 5.0])
def test_quadratic_potential_is_ball_convex(radius):
    report = check_v_convex_ball(field('(x1 - 0.5)^2 + (x2 + 0.5)^2', 2), [0.5, -0.5], radius)
    assert report.verdict == Verdict.HOLDS
    assert report.worst_residual == pytest.approx(2 * radius, rel=1e-12)


def test_zero_potential_is_ball_convex():
    report = check_v_convex_ball(field('0', 2), [0.0, 0.0], 1.0)
    assert report.verdict == Verdict.HOLDS
    assert any('curvature' in note for note in report.notes)


def test_linear_potential_violates_ball_convexity():
    report = check_v_convex_ball(field('-x1', 2), [0.0, 0.0], 1.0)
    assert report.verdict == Verdict.VIOLATED
    assert report.worst_residual == pytest.approx(-1.0)
    assert report.worst_point == pytest.approx((1.0, 0.0))


def test_ball_convexity_in_three_dimensions():
    report = check_v_convex_ball(field('x1^2 + x2^2 + x3^2', 3), [0.0, 0.0, 0.0], 2.0, samples=32, seed=4)
    assert report.verdict == Verdict.HOLDS
    assert report.sample_count == 32


def test_ball_convexity_rejects_bad_radius():
    with pytest.raises(ValueError):
        check_v_convex_ball(field('x1^2'), [0.0], 0.0)


def test_boundary_normal_for_quadratic_potential():
    report = check_boundary_normal(field('x1^2'), [0.0], 1.0, TimeWindow(s=0.5, t=1.0),
                                   interior=[[0.0], [0.5], [-0.3]], opts=SolverOptions(n=100))
    assert report.condition_id == ConditionId.BOUNDARY_1_13
    assert report.verdict == Verdict.HOLDS
    assert report.sample_count == 6
    assert report.notes[0] == 'confinement: 6 of 6 geodesics stay in the ball'


# ---------------------------------------------------------------------------
# Limits at t -> s+
# ---------------------------------------------------------------------------

def test_limits_heat():
    provider = HeatOmega(1)
    assert provider.omega([1.0], [0.0], 1.001, 1.0) == pytest.approx(250.0, rel=1e-9)
    report = check_beta_boundary_limits(rate_pair_heat(1), provider, [([1.0], [0.0]), ([0.5], [0.5])])
    assert report.condition_id == ConditionId.BETA_ZERO_LIMIT
    assert report.verdict == Verdict.HOLDS


def test_limits_quadratic_at_centre():
    provider = QuadraticOmega(1, 1.0)
    assert provider.omega([0.0], [0.0], 1.001, 1.0) == 0.0
    report = check_beta_boundary_limits(rate_pair_quadratic(1, 1.0), provider,
                                        [([0.0], [0.0]), ([1.0], [-1.0])])
    assert report.verdict == Verdict.HOLDS


def test_limits_flag_growing_beta():
    report = check_beta_boundary_limits(rate_pair_power(1, -0.5), HeatOmega(1), [([1.0], [0.0])])
    assert report.verdict == Verdict.VIOLATED


# ---------------------------------------------------------------------------
# Comparison selection
# ---------------------------------------------------------------------------

def test_comparison_sine():
    result = comparison_select(parse('sin(x1) + 2', 1), [(-5.0, 5.0)])
    assert result.sup_laplacian == pytest.approx(1.0, abs=1e-6)
    assert result.C == pytest.approx(1.0 / np.sqrt(2.0), rel=1e-12)
    assert result.report.verdict == Verdict.HOLDS
    assert result.rate_pair.A(0.5) == pytest.approx(np.sinh(np.sqrt(2.0) * 0.5))


@pytest.mark.parametrize('C0', [0.5, 1.0, 2.0])
def test_comparison_quadratic(C0):
    result = comparison_select(parse(f'{C0 * C0!r}*x1^2', 1), [(-3.0, 3.0)])
    assert result.C == pytest.approx(C0, rel=1e-12)
    assert result.report.verdict == Verdict.HOLDS


def test_comparison_zero_potential_notes_heat_limit():
    result = comparison_select(parse('0', 1), [(-1.0, 1.0)])
    assert result.C == pytest.approx(2.0 ** -10)
    assert any('heat pair' in note for note in result.report.notes)


def test_comparison_two_dimensions():
    result = comparison_select(parse('sin(x1) + sin(x2) + 4', 2), [(-4.0, 4.0)] * 2)
    assert result.sup_laplacian == pytest.approx(2.0, abs=1e-6)
    assert result.C == pytest.approx(1.0 / np.sqrt(2.0), rel=1e-12)


def test_comparison_unbounded_laplacian_is_inconclusive():
    result = comparison_select(parse('exp(x1^2)', 1), [(-5.0, 5.0)])
    assert result.rate_pair is None
    assert result.report.verdict == Verdict.INCONCLUSIVE


def test_comparison_pair_passes_integral_check():
    expr = parse('sin(x1) + 2', 1)
    result = comparison_select(expr, [(-5.0, 5.0)])
    V = differentiate(expr)
    rng = np.random.default_rng(2)
    geodesics = []
    for _ in range(10):
        y, x = rng.uniform(-2.0, 2.0, size=2)
        s = rng.uniform(0.2, 1.0)
        t = s + rng.uniform(0.2, 1.0)
        geodesics.append(solve_geodesic([y], [x], TimeWindow(s=s, t=t), V, SolverOptions(n=100)))
    report = check_second_order_integral(V, result.rate_pair, geodesics)
    assert report.verdict in PASSING
