#!/usr/bin/env python3
"""
Test Verify Module
==================
Harnack scans on closed-form kernels and grid solutions, sharpness search,
the differential form of the bound and the nested-box probe.
"""

import sys
import logging
from pathlib import Path

import numpy as np
import pytest

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent))

from modules.closedform import (
    KernelKind,
    KernelSpec,
    rate_pair_heat,
    rate_pair_power,
    rate_pair_quadratic,
)
from modules.conditions import HeatOmega, QuadraticOmega, ShiftedOmega, Verdict
from modules.expr import parse
from modules.pde import BoxGrid, InitialData, solve, solve_drift
from modules.verify import (
    HarnackVerdict,
    SamplerConfig,
    characteristic_cases,
    differential_harnack,
    equality_ratios,
    harnack_scan,
    is_excluded,
    locate,
    make_quadruples,
    nested_domain_probe,
    sample_grid_quadruples,
    sample_kernel_quadruples,
    sharpness_locate,
)

logging.basicConfig(level=logging.INFO, format='%(message)s')
logger = logging.getLogger(__name__)

HEAT = KernelSpec(KernelKind.HEAT, d=1)
MEHLER = KernelSpec(KernelKind.MEHLER, d=1, C1=1.0)
SQRT2 = float(np.sqrt(2.0))


@pytest.fixture(scope='module')
def acceptance_solution():
    """V = x^2 from a unit Gaussian on [-8, 8]"""
    grid = BoxGrid.uniform([(-8.0, 8.0)], 321, 1e-3, 1.0, (0.2, 0.5, 1.0))
    return solve(parse('x1^2', 1), InitialData.gaussian([0.0], 1.0), grid)


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------

def test_exclusion_rule():
    config = SamplerConfig()
    assert is_excluded([0.0], [3.0], 1.0, 0.99, 3.0, config)
    assert not is_excluded([0.0], [3.0], 1.0, 0.5, 3.0, config)
    assert not is_excluded([0.0], [0.1], 1.0, 0.99, 3.0, config)


def test_sampler_config_validation():
    with pytest.raises(ValueError):
        SamplerConfig(count=0)
    with pytest.raises(ValueError):
        SamplerConfig(t_range=(0.0, 1.0))


def test_kernel_quadruples_are_seeded():
    config = SamplerConfig(count=50, seed=11)
    first = sample_kernel_quadruples([(-3.0, 3.0)], config)
    second = sample_kernel_quadruples([(-3.0, 3.0)], config)
    assert [q.as_tuple() for q in first] == [q.as_tuple() for q in second]
    assert all(q.s < q.t for q in first)
    assert all(0.1 <= q.s and q.t <= 2.0 for q in first)


def test_grid_quadruples_use_nodes_and_snapshots(acceptance_solution):
    quadruples = sample_grid_quadruples(acceptance_solution, SamplerConfig(count=100, seed=2))
    axis = acceptance_solution.grid.axes[0]
    for q in quadruples:
        assert q.t in acceptance_solution.times and q.s in acceptance_solution.times
        assert np.min(np.abs(axis - q.x[0])) == 0.0
        assert abs(q.x[0]) < 8.0 - 0.09


def test_grid_quadruples_need_two_times():
    grid = BoxGrid.uniform([(-2.0, 2.0)], 41, 0.01, 0.1)
    solution = solve(parse('0', 1), InitialData.constant(1.0), grid)
    with pytest.raises(ValueError):
        sample_grid_quadruples(solution, SamplerConfig(count=10))


def test_explicit_quadruples_need_ordered_times():
    with pytest.raises(ValueError):
        make_quadruples([([0.0], [0.0], 0.5, 1.0)])


# ---------------------------------------------------------------------------
# Closed-form kernels
# ---------------------------------------------------------------------------

def test_heat_kernel_scan_holds():
    report = harnack_scan(HEAT, rate_pair_heat(1), HeatOmega(1), SamplerConfig(count=2000, seed=0))
    assert report.verdict == HarnackVerdict.PASS
    assert report.min_ratio >= 1.0 - 1e-9
    assert report.violations == []
    assert report.skipped_count == 0


def test_heat_kernel_equality_on_characteristic_set():
    quadruples = make_quadruples([
        ([1.0], [0.5], 1.0, 0.5),
        ([-2.0], [-0.5], 2.0, 0.5),
        ([0.3], [0.1], 0.9, 0.3),
    ])
    report = harnack_scan(HEAT, rate_pair_heat(1), HeatOmega(1), quadruples=quadruples)
    assert np.allclose(report.ratios, 1.0, atol=1e-10)
    assert report.passed


def test_heat_kernel_two_dimensions():
    kernel = KernelSpec(KernelKind.HEAT, d=2)
    report = harnack_scan(kernel, rate_pair_heat(2), HeatOmega(2), SamplerConfig(count=500, seed=4))
    assert report.passed
    assert list(report.to_frame().columns) == ['x1', 'x2', 'y1', 'y2', 't', 's', 'ratio']


def test_mehler_kernel_scan_holds():
    report = harnack_scan(MEHLER, rate_pair_quadratic(1, 1.0), QuadraticOmega(1, 1.0),
                          SamplerConfig(count=10000, seed=0))
    assert report.quadruple_count == 10000
    assert report.min_ratio >= 1.0 - 1e-9
    assert report.verdict == HarnackVerdict.PASS


def test_mehler_equality_points():
    ratios = equality_ratios(MEHLER, rate_pair_quadratic(1, 1.0), QuadraticOmega(1, 1.0))
    assert ratios.shape == (50,)
    assert np.all(np.abs(ratios - 1.0) <= 1e-8)


def test_heat_equality_points():
    ratios = equality_ratios(HEAT, rate_pair_heat(1), HeatOmega(1))
    assert np.all(np.abs(ratios - 1.0) <= 1e-10)


def test_characteristic_cases_are_seeded():
    first = characteristic_cases(MEHLER, count=5, seed=3)
    second = characteristic_cases(MEHLER, count=5, seed=3)
    for a, b in zip(first, second):
        assert np.array_equal(a[0], b[0]) and a[2:] == b[2:]


def test_wrong_beta_fails():
    report = harnack_scan(HEAT, rate_pair_power(1, 0.25), HeatOmega(1), SamplerConfig(count=2000, seed=0))
    assert report.verdict == HarnackVerdict.FAIL
    assert report.violations
    for violation in report.violations:
        assert violation.ratio < 1.0 - report.tolerance


def test_larger_beta_exponent_holds():
    report = harnack_scan(HEAT, rate_pair_power(1, 1.0), HeatOmega(1), SamplerConfig(count=500, seed=0))
    assert report.passed


def test_violations_shrink_as_tolerance_grows():
    report = harnack_scan(HEAT, rate_pair_power(1, 0.25), HeatOmega(1), SamplerConfig(count=1000, seed=5))
    counts = [len(report.violations_at(tol)) for tol in (0.0, 1e-6, 1e-3, 1e-2, 0.1, 0.5)]
    assert counts == sorted(counts, reverse=True)
    assert counts[0] > counts[-1]
    strict = {(v.t, v.s, v.x[0], v.y[0]) for v in report.violations_at(0.1)}
    loose = {(v.t, v.s, v.x[0], v.y[0]) for v in report.violations_at(1e-3)}
    assert strict <= loose


def test_reports_are_reproducible():
    config = SamplerConfig(count=300, seed=9)
    first = harnack_scan(MEHLER, rate_pair_quadratic(1, 1.0), QuadraticOmega(1, 1.0), config)
    second = harnack_scan(MEHLER, rate_pair_quadratic(1, 1.0), QuadraticOmega(1, 1.0), config)
    assert first.config_hash == second.config_hash
    assert np.array_equal(first.ratios, second.ratios)
    assert first.to_dict() == second.to_dict()

    other = harnack_scan(MEHLER, rate_pair_quadratic(1, 1.0), QuadraticOmega(1, 1.0),
                         SamplerConfig(count=300, seed=10))
    assert other.config_hash != first.config_hash


def test_shift_leaves_ratios_unchanged():
    config = SamplerConfig(count=500, seed=3, t_range=(0.5, 2.0), delta_fraction=0.2, far_fraction=0.0)
    alpha = 0.7
    plain = harnack_scan(MEHLER, rate_pair_quadratic(1, 1.0), QuadraticOmega(1, 1.0), config)
    shifted_kernel = KernelSpec(KernelKind.MEHLER, d=1, C1=1.0, C2=alpha)
    shifted = harnack_scan(shifted_kernel, rate_pair_quadratic(1, 1.0),
                           ShiftedOmega(QuadraticOmega(1, 1.0), alpha), config)
    assert shifted.min_ratio == pytest.approx(plain.min_ratio, rel=1e-12)
    assert np.allclose(np.log(shifted.ratios), np.log(plain.ratios), rtol=0.0, atol=1e-9)


def test_ou_kernel_with_drift():
    kernel = KernelSpec(KernelKind.OU_TRANSFORMED, d=1, C1=1.0, C2=1.0)
    provider = QuadraticOmega(1, SQRT2, C2=1.0)
    drift = parse('-0.5*x1^2', 1)
    report = harnack_scan(kernel, rate_pair_quadratic(1, SQRT2), provider,
                          SamplerConfig(count=2000, seed=1), drift=drift)
    assert report.passed
    assert report.config['drift'] is not None

    cases = characteristic_cases(kernel, count=20, seed=2)
    on_set = harnack_scan(kernel, rate_pair_quadratic(1, SQRT2), provider,
                          quadruples=make_quadruples(cases), drift=drift)
    assert np.all(np.abs(on_set.ratios - 1.0) <= 1e-8)


def test_report_serialisation():
    report = harnack_scan(HEAT, rate_pair_power(1, 0.25), HeatOmega(1), SamplerConfig(count=200, seed=0))
    payload = report.to_dict()
    assert payload['verdict'] == 'fail'
    assert payload['quadruple_count'] == 200
    assert len(payload['sharpness']) == 10
    frame = report.to_frame()
    assert list(frame.columns) == ['x', 'y', 't', 's', 'ratio']
    assert len(frame) == 200
    assert frame['ratio'].min() == pytest.approx(report.min_ratio)


# ---------------------------------------------------------------------------
# Sharpness search
# ---------------------------------------------------------------------------

def test_heat_sharpness():
    point = locate(HEAT, rate_pair_heat(1), HeatOmega(1), [1.0], 1.0, 0.5)
    assert point.y_star[0] == pytest.approx(0.5, abs=1e-6)
    assert point.ratio == pytest.approx(1.0, abs=1e-8)
    assert point.on_characteristic and point.is_equality
    assert not point.at_bound


def test_mehler_sharpness():
    point = locate(MEHLER, rate_pair_quadratic(1, 1.0), QuadraticOmega(1, 1.0), [1.0], 0.5, 0.25)
    assert point.y_star[0] == pytest.approx(np.sinh(0.5) / np.sinh(1.0), abs=1e-6)
    assert point.y_star[0] == pytest.approx(0.443409, abs=1e-6)
    assert point.ratio == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize('kernel, rate_pair, provider', [
    (HEAT, rate_pair_heat(1), HeatOmega(1)),
    (MEHLER, rate_pair_quadratic(1, 1.0), QuadraticOmega(1, 1.0)),
])
def test_sharpness_at_origin(kernel, rate_pair, provider):
    point = locate(kernel, rate_pair, provider, [0.0], 1.0, 0.4)
    assert abs(point.y_star[0]) <= 1e-6
    assert point.is_equality


def test_sharpness_several_cases():
    cases = [([1.0], 1.0, 0.5), ([-1.5], 2.0, 0.2), ([0.7], 0.6, 0.3)]
    points = sharpness_locate(MEHLER, rate_pair_quadratic(1, 1.0), QuadraticOmega(1, 1.0), cases)
    assert len(points) == 3
    assert all(p.on_characteristic and p.is_equality for p in points)
    assert points[0].to_dict()['on_characteristic'] is True


def test_sharpness_flags_search_bound():
    point = locate(HEAT, rate_pair_heat(1), HeatOmega(1), [2.5], 1.0, 0.5, bounds=(-1.0, 1.0))
    assert point.at_bound
    assert not point.on_characteristic


def test_sharpness_needs_ordered_times():
    with pytest.raises(ValueError):
        locate(HEAT, rate_pair_heat(1), HeatOmega(1), [1.0], 0.5, 1.0)


# ---------------------------------------------------------------------------
# Grid solutions
# ---------------------------------------------------------------------------

def test_quadratic_potential_acceptance_run(acceptance_solution):
    report = harnack_scan(acceptance_solution, rate_pair_quadratic(1, 1.0), QuadraticOmega(1, 1.0),
                          SamplerConfig(count=2000, seed=0), tolerance=2e-3)
    assert report.verdict == HarnackVerdict.PASS
    assert report.min_ratio >= 1.0 - 2e-3
    assert report.config['subject']['kind'] == 'grid'


def test_constant_solution_holds():
    grid = BoxGrid.uniform([(-4.0, 4.0)], 81, 0.01, 1.0, (0.25, 0.5))
    solution = solve(parse('0', 1), InitialData.constant(2.0), grid)
    report = harnack_scan(solution, rate_pair_heat(1), HeatOmega(1), SamplerConfig(count=500, seed=0))
    assert report.passed
    # smallest ratio (t/s)^(1/2) e^omega over the snapshot pairs
    assert report.min_ratio >= np.sqrt(1.0 / 0.5) - 1e-8


def test_grid_scan_skips_nothing_with_closed_forms(acceptance_solution):
    report = harnack_scan(acceptance_solution, rate_pair_quadratic(1, 1.0), QuadraticOmega(1, 1.0),
                          SamplerConfig(count=100, seed=1), tolerance=2e-3)
    assert report.skipped_count == 0
    assert np.all(np.isfinite(report.ratios))


def test_drift_solution_matches_effective_route():
    grid = BoxGrid.uniform([(-4.0, 4.0)], 161, 1e-3, 0.5, (0.25,))
    f = parse('-0.5*x1^2', 1)
    V = parse('x1^2', 1)
    drifted = solve_drift(f, V, InitialData.expression('exp(-x1^2)'), grid)
    plain = solve(drifted.potential, InitialData.expression('exp(-0.5*x1^2)'), grid)
    weight = np.exp(-0.5 * grid.axes[0] ** 2)
    for t in (0.25, 0.5):
        expected = plain.snapshot(t) * weight
        assert np.max(np.abs(drifted.snapshot(t) - expected) / expected) <= 1e-8


def test_ou_drift_grid_scan():
    grid = BoxGrid.uniform([(-6.0, 6.0)], 241, 1e-3, 1.0, (0.2, 0.5, 1.0))
    f = parse('-0.5*x1^2', 1)
    solution = solve_drift(f, parse('x1^2', 1), InitialData.gaussian([0.0], 1.0), grid)
    report = harnack_scan(solution, rate_pair_quadratic(1, SQRT2), QuadraticOmega(1, SQRT2, C2=1.0),
                          SamplerConfig(count=500, seed=0), tolerance=2e-3, drift=f)
    assert report.verdict == HarnackVerdict.PASS


# ---------------------------------------------------------------------------
# Differential Harnack
# ---------------------------------------------------------------------------

def test_differential_heat_kernel_equality():
    report = differential_harnack(HEAT, rate_pair_heat(1))
    assert report.verdict == Verdict.HOLDS_WITH_EQUALITY
    assert abs(report.worst_residual) <= 1e-12


def test_differential_mehler_kernel_equality():
    report = differential_harnack(MEHLER, rate_pair_quadratic(1, 1.0))
    assert report.verdict == Verdict.HOLDS_WITH_EQUALITY


def test_differential_ou_kernel_with_drift():
    kernel = KernelSpec(KernelKind.OU_TRANSFORMED, d=1, C1=1.0, C2=1.0)
    report = differential_harnack(kernel, rate_pair_quadratic(1, SQRT2), drift=parse('-0.5*x1^2', 1))
    assert report.verdict == Verdict.HOLDS_WITH_EQUALITY


def test_differential_wrong_beta_is_violated():
    report = differential_harnack(HEAT, rate_pair_power(1, 0.25))
    assert report.verdict == Verdict.VIOLATED


def test_differential_two_dimensional_kernel():
    kernel = KernelSpec(KernelKind.MEHLER, d=2, C1=0.5)
    report = differential_harnack(kernel, rate_pair_quadratic(2, 0.5))
    assert report.verdict == Verdict.HOLDS_WITH_EQUALITY
    assert report.sample_count == 81 * 4


def test_differential_grid_solution():
    grid = BoxGrid.uniform([(-8.0, 8.0)], 321, 1e-3, 1.0, (0.1, 0.5, 1.0))
    solution = solve(parse('x1^2', 1), InitialData.gaussian([0.0], 0.7), grid)
    report = differential_harnack(solution, rate_pair_quadratic(1, 1.0))
    assert report.verdict == Verdict.HOLDS
    assert report.worst_residual >= -1e-3


def test_differential_grid_needs_late_snapshots():
    grid = BoxGrid.uniform([(-2.0, 2.0)], 41, 0.01, 0.05)
    solution = solve(parse('0', 1), InitialData.constant(1.0), grid)
    with pytest.raises(ValueError):
        differential_harnack(solution, rate_pair_heat(1))


# ---------------------------------------------------------------------------
# Nested boxes
# ---------------------------------------------------------------------------

def _inner_quadruples():
    points = [-2.0, -1.0, 0.0, 0.5, 1.5, 2.5]
    times = [(0.5, 0.2), (1.0, 0.2), (1.0, 0.5)]
    return make_quadruples([([x], [y], t, s) for x in points for y in points for t, s in times])


def test_nested_boxes_stabilise():
    table = nested_domain_probe(parse('x1^2', 1), InitialData.gaussian([0.0], 1.0), [4.0, 6.0, 8.0],
                                _inner_quadruples(), rate_pair_quadratic(1, 1.0), QuadraticOmega(1, 1.0))
    assert list(table.columns) == ['half_width', 'nx', 'min_ratio', 'verdict', 'sup_difference']
    assert list(table['nx']) == [161, 241, 321]
    assert np.isnan(table['sup_difference'].iloc[0])
    differences = table['sup_difference'].iloc[1:].to_numpy()
    assert differences[1] < differences[0]
    assert (table['min_ratio'] >= 1.0 - 2e-3).all()
    assert (table['verdict'] == 'pass').all()


def test_nested_boxes_constant_solution():
    table = nested_domain_probe(parse('0', 1), InitialData.constant(1.0), [4.0, 6.0],
                                _inner_quadruples(), rate_pair_heat(1), HeatOmega(1))
    assert table['sup_difference'].iloc[1] <= 1e-10
    assert (table['verdict'] == 'pass').all()


def test_nested_boxes_reject_outside_quadruples():
    outside = make_quadruples([([3.5], [0.0], 1.0, 0.5)])
    with pytest.raises(ValueError):
        nested_domain_probe(parse('0', 1), InitialData.constant(1.0), [3.0, 4.0], outside,
                            rate_pair_heat(1), HeatOmega(1))
    with pytest.raises(ValueError):
        nested_domain_probe(parse('0', 1), InitialData.constant(1.0), [4.0, 3.0], _inner_quadruples(),
                            rate_pair_heat(1), HeatOmega(1))


if __name__ == "__main__":
    pytest.main([__file__, '-v'])
