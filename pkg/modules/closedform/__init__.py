"""
Closed Forms Module
===================
Exact reference formulas for regression and sharpness testing.

This module handles:
1. Heat, Mehler and Ornstein-Uhlenbeck kernels (log-space evaluation)
2. Closed-form actions and geodesics for V = 0 and quadratic V
3. Rate pairs (A, beta)
4. The drift transform and the Harnack right-hand side
"""

from .kernels import (
    KernelKind,
    KernelSpec,
    coth,
    heat_kernel,
    log_heat_kernel,
    log_mehler_kernel,
    log_sinh,
    mehler_kernel,
)
from .rates import RatePair, rate_pair_heat, rate_pair_power, rate_pair_quadratic
from .omega import (
    geodesic_quadratic,
    omega_expression,
    omega_heat,
    omega_heat_values,
    omega_quadratic,
    omega_quadratic_values,
)
from .drift import drift_transform, is_zero_drift
from .bounds import harnack_rhs, log_harnack_rhs

__all__ = [
    'KernelKind',
    'KernelSpec',
    'heat_kernel',
    'mehler_kernel',
    'log_heat_kernel',
    'log_mehler_kernel',
    'log_sinh',
    'coth',
    'RatePair',
    'rate_pair_heat',
    'rate_pair_quadratic',
    'rate_pair_power',
    'omega_heat',
    'omega_heat_values',
    'omega_quadratic',
    'omega_quadratic_values',
    'geodesic_quadratic',
    'omega_expression',
    'drift_transform',
    'is_zero_drift',
    'harnack_rhs',
    'log_harnack_rhs',
]
