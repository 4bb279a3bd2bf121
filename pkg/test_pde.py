#!/usr/bin/env python3
"""
Test PDE Module
===============
Neumann solves against exact solutions and the Mehler oracle, the drift
route, step size suggestions and boundary flux.
"""

import sys
import logging
from pathlib import Path

import numpy as np
import pytest

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent))

from modules.closedform import KernelKind, KernelSpec, mehler_kernel
from modules.expr import differentiate, parse
from modules.pde import (
    BoxGrid,
    InitialData,
    NonPositiveSolutionError,
    Scheme,
    neumann_flux,
    solve,
    solve_drift,
    stability_probe,
)

logging.basicConfig(level=logging.INFO, format='%(message)s')
logger = logging.getLogger(__name__)


def box(half_width, nx, dt, t_end, snapshots=(), d=1):
    return BoxGrid.uniform([(-half_width, half_width)] * d, nx, dt, t_end, snapshots)


# ---------------------------------------------------------------------------
# Grids and initial data
# ---------------------------------------------------------------------------

def test_grid_validation():
    with pytest.raises(ValueError):
        box(1.0, 8, 0.01, 1.0)
    with pytest.raises(ValueError):
        box(1.0, 32, 0.01, 1.0, d=3)
    with pytest.raises(ValueError):
        box(1.0, 32, 0.0, 1.0)
    with pytest.raises(ValueError):
        box(1.0, 32, 0.01, 1.0, snapshots=(0.5, 1.5))
    with pytest.raises(ValueError):
        box(1.0, 32, 0.01, 1.0, snapshots=(0.5, 0.2))


def test_grid_geometry():
    grid = box(8.0, 321, 1e-3, 1.0)
    assert grid.spacing == pytest.approx((0.05,))
    assert grid.nodes().shape == (321, 1)
    refined = grid.refined()
    assert refined.nx == 641
    assert refined.dt == pytest.approx(5e-4)
    assert np.allclose(refined.axes[0][::2], grid.axes[0])
    assert grid.interior_mask(2).sum() == 317


def test_initial_presets():
    nodes = np.array([[0.0], [1.0]])
    assert InitialData.constant(2.0).evaluate(nodes) == pytest.approx([2.0, 2.0])
    assert InitialData.gaussian([0.0], 1.0).evaluate(nodes) == pytest.approx([1.0, np.exp(-0.5)])
    snapshot = InitialData.mehler_snapshot(0.1).evaluate(nodes)
    assert snapshot == pytest.approx(mehler_kernel(nodes, 0.1, 1, 1.0), rel=1e-14)
    assert InitialData.expression('x1^2 + 1').evaluate(nodes) == pytest.approx([1.0, 2.0])
    with pytest.raises(ValueError):
        InitialData.constant(0.0)
    with pytest.raises(ValueError):
        InitialData.gaussian([0.0], -1.0)


# ---------------------------------------------------------------------------
# Exact solutions
# ---------------------------------------------------------------------------

@pytest.mark.parametrize('d', [1, 2])
def test_constants_are_preserved(d):
    grid = box(1.0, 33, 0.01, 1.0, snapshots=(0.5,), d=d)
    solution = solve(parse('0', d), InitialData.constant(1.0), grid)
    assert solution.scheme == Scheme.CRANK_NICOLSON
    assert solution.steps == 100
    for t in solution.times:
        assert np.max(np.abs(solution.snapshots[t] - 1.0)) <= 1e-10


def test_constant_potential_decay():
    grid = box(1.0, 33, 1e-3, 1.0)
    solution = solve(parse('1', 1), InitialData.constant(1.0), grid)
    assert np.max(np.abs(solution.snapshot(1.0) - np.exp(-1.0))) <= 1e-6


def test_snapshot_times_are_hit_exactly():
    grid = box(1.0, 33, 0.25, 1.0, snapshots=(0.3,))
    solution = solve(parse('0', 1), InitialData.constant(1.0), grid)
    assert solution.times == [0.3, 1.0]
    assert solution.steps == 5


def test_mehler_oracle():
    grid = box(8.0, 6401, 5e-4, 0.4)
    solution = solve(parse('x1^2', 1), InitialData.mehler_snapshot(0.1), grid)
    x = grid.axes[0]
    interior = np.abs(x) <= 4.0
    exact = mehler_kernel(x[interior], 0.5, 1, 1.0)
    relative = np.abs(solution.snapshot(0.4)[interior] - exact) / exact
    assert relative.max() <= 1e-3


def test_convergence_order():
    errors = []
    for nx, dt in [(161, 4e-3), (321, 2e-3)]:
        grid = box(8.0, nx, dt, 0.4)
        solution = solve(parse('x1^2', 1), InitialData.mehler_snapshot(0.25), grid)
        x = grid.axes[0]
        interior = np.abs(x) <= 2.0
        exact = mehler_kernel(x[interior], 0.65, 1, 1.0)
        errors.append(np.max(np.abs(solution.snapshot(0.4)[interior] - exact)))
    order = np.log2(errors[0] / errors[1])
    logger.info(f"observed order {order:.3f}")
    assert order >= 1.8


def test_two_dimensional_gaussian_stays_positive():
    grid = box(2.0, 33, 0.01, 0.2, d=2)
    solution = solve(parse('x1^2 + x2^2', 2), InitialData.gaussian([0.0, 0.0], 0.5), grid)
    assert solution.min_value > 0
    assert solution.snapshot(0.2).shape == (33, 33)
    u = solution.snapshot(0.2)
    assert np.allclose(u, u.T, rtol=1e-12)


# ---------------------------------------------------------------------------
# Scheme selection and positivity
# ---------------------------------------------------------------------------

def test_rough_data_uses_backward_euler():
    grid = box(1.0, 33, 0.5, 1.0)
    solution = solve(parse('0', 1), InitialData.expression('exp(-400*x1^2)'), grid)
    assert solution.scheme == Scheme.BACKWARD_EULER
    assert solution.min_value > 0


def test_non_positive_step_aborts():
    grid = box(1.0, 33, 0.5, 1.0)
    with pytest.raises(NonPositiveSolutionError) as info:
        solve(parse('0', 1), InitialData.expression('exp(-400*x1^2)'), grid, scheme=Scheme.CRANK_NICOLSON)
    assert info.value.step == 1


def test_initial_data_must_be_positive():
    grid = box(1.0, 33, 0.01, 0.1)
    with pytest.raises(ValueError):
        solve(parse('0', 1), InitialData.expression('x1'), grid)


# ---------------------------------------------------------------------------
# Solution access
# ---------------------------------------------------------------------------

def test_snapshots_are_read_only():
    solution = solve(parse('0', 1), InitialData.gaussian([0.0], 0.5), box(2.0, 41, 0.01, 0.1))
    with pytest.raises(ValueError):
        solution.snapshot(0.1)[0] = 1.0


def test_interpolation():
    grid = box(2.0, 41, 0.01, 0.1)
    solution = solve(parse('0', 1), InitialData.gaussian([0.0], 0.5), grid)
    u = solution.snapshot(0.1)
    x = grid.axes[0]
    assert solution.interpolate(x[10:12], 0.1) == pytest.approx(u[10:12])
    midpoint = solution.interpolate([0.5 * (x[10] + x[11])], 0.1)
    assert midpoint[0] == pytest.approx(0.5 * (u[10] + u[11]))
    with pytest.raises(ValueError):
        solution.interpolate([0.0], 0.05)


def test_frame_layout():
    grid = box(1.0, 17, 0.05, 0.2, snapshots=(0.1,), d=2)
    frame = solve(parse('0', 2), InitialData.constant(1.0), grid).to_frame()
    assert list(frame.columns) == ['t', 'x1', 'x2', 'u']
    assert len(frame) == 2 * 17 * 17


def test_refined_solution_agrees():
    grid = box(3.0, 61, 0.01, 0.3)
    solution = solve(parse('x1^2', 1), InitialData.gaussian([0.0], 0.7), grid)
    refined = solution.refined()
    assert refined.grid.nx == 121
    assert np.max(np.abs(refined.snapshot(0.3)[::2] - solution.snapshot(0.3))) <= 1e-2


# ---------------------------------------------------------------------------
# Boundary flux
# ---------------------------------------------------------------------------

def test_neumann_flux_is_small():
    grid = box(3.0, 121, 1e-3, 1.0, snapshots=(0.1, 0.5))
    solution = solve(parse('0', 1), InitialData.gaussian([0.0], 0.5), grid)
    for t, flux in neumann_flux(solution).items():
        assert flux.shape == (2,)
        assert np.max(np.abs(flux)) <= 1e-3 * np.max(solution.snapshots[t])


def test_neumann_flux_two_dimensions():
    grid = box(3.0, 49, 0.01, 0.2, d=2)
    solution = solve(parse('x1^2 + x2^2', 2), InitialData.gaussian([0.0, 0.0], 0.5), grid)
    flux = neumann_flux(solution)[0.2]
    assert flux.shape == (4 * 49,)
    assert np.max(np.abs(flux)) <= 1e-3 * np.max(solution.snapshot(0.2))


# ---------------------------------------------------------------------------
# Drift equation
# ---------------------------------------------------------------------------

def test_zero_drift_matches_plain_solve():
    grid = box(2.0, 41, 0.01, 0.2)
    V = parse('x1^2', 1)
    plain = solve(V, InitialData.gaussian([0.3], 0.5), grid)
    drifted = solve_drift(parse('0', 1), V, InitialData.gaussian([0.3], 0.5), grid)
    assert np.array_equal(plain.snapshot(0.2), drifted.snapshot(0.2))


def test_ou_drift_uses_effective_potential():
    grid = box(2.0, 41, 0.01, 0.1)
    solution = solve_drift(parse('-0.5*x1^2', 1), parse('x1^2', 1), InitialData.gaussian([0.0], 1.0), grid)
    effective = differentiate(solution.potential)
    assert effective.value([0.5]) == pytest.approx(1.5, abs=1e-12)
    assert effective.value([2.0]) == pytest.approx(9.0, abs=1e-12)
    assert solution.drift is not None


def test_ou_drift_matches_kernel():
    kernel = KernelSpec(KernelKind.OU_TRANSFORMED, d=1, C1=1.0, C2=1.0)
    t0, span = 0.2, 0.4
    peak = kernel.value([0.0], t0)
    rate = kernel.log_value([0.0], t0) - kernel.log_value([1.0], t0)
    u0 = InitialData.expression(f"{peak!r} * exp(-{rate!r} * x1^2)")
    grid = box(6.0, 4801, 5e-4, span)
    solution = solve_drift(parse('-0.5*x1^2', 1), parse('x1^2', 1), u0, grid)
    x = grid.axes[0]
    interior = np.abs(x) <= 3.0
    exact = kernel.value(x[interior], t0 + span)
    relative = np.abs(solution.snapshot(span)[interior] - exact) / exact
    assert relative.max() <= 1e-3


def test_linear_drift_closed_form():
    grid = box(2.0, 41, 1e-3, 1.0)
    solution = solve_drift(parse('x1', 1), parse('0', 1), InitialData.expression('exp(x1)'), grid)
    exact = np.exp(grid.axes[0] - 1.0)
    assert np.max(np.abs(solution.snapshot(1.0) - exact) / exact) <= 1e-6


def test_drift_solution_refines():
    grid = box(2.0, 41, 1e-2, 0.2)
    solution = solve_drift(parse('x1', 1), parse('0', 1), InitialData.expression('exp(x1)'), grid)
    refined = solution.refined()
    assert refined.drift is not None
    assert np.allclose(refined.snapshot(0.2)[::2], solution.snapshot(0.2), rtol=1e-5)


# ---------------------------------------------------------------------------
# Step size suggestion
# ---------------------------------------------------------------------------

def test_stability_probe_quadratic():
    assert stability_probe(box(8.0, 321, 1e-3, 1.0), parse('x1^2', 1)) == pytest.approx(1.5625e-3, rel=1e-12)


def test_stability_probe_zero_potential():
    assert stability_probe(box(8.0, 321, 1e-3, 1.0), parse('0', 1)) == pytest.approx(10 * 0.05 ** 2, rel=1e-12)


def test_stability_probe_warns_on_long_runs(caplog):
    with caplog.at_level(logging.WARNING):
        dt = stability_probe(box(8.0, 321, 1e-3, 1.0), parse('1000000', 1))
    assert dt == pytest.approx(1e-7)
    assert 'steps' in caplog.text
