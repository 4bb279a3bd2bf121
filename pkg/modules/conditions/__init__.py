"""
Conditions Module
=================
Sampled certification of the Harnack hypotheses.

This module handles:
1. Omega providers (closed forms with analytic derivatives, numeric geodesics)
2. First- and second-order inequalities on omega and their integral forms
3. V-convexity of balls and the boundary normal condition
4. Limits at t -> s+ and beta(0+) = 0
5. Rate pair selection by Laplacian comparison
"""

from .report import (
    ANALYTIC,
    NUMERIC,
    QUADRATURE,
    ConditionId,
    ConditionReport,
    ToleranceProfile,
    Verdict,
    profile_for,
    scaled_residual,
    summarize,
)
from .sampling import Sample, SampleSet, build_sample_set
from .providers import (
    HeatOmega,
    NumericOmega,
    OmegaBatch,
    OmegaProvider,
    QuadraticOmega,
    ShiftedOmega,
    provider_for,
)
from .checks import (
    check_first_order,
    check_lemma_2_4,
    check_second_order,
    check_second_order_integral,
    rate_bound,
    weighted_laplacian_sum,
)
from .geometry import check_boundary_normal, check_v_convex_ball, sphere_points
from .limits import beta_decay_residuals, check_beta_boundary_limits
from .comparison import ComparisonResult, c_grid, comparison_select, sup_laplacian

__all__ = [
    'ConditionId',
    'ConditionReport',
    'Verdict',
    'ToleranceProfile',
    'ANALYTIC',
    'NUMERIC',
    'QUADRATURE',
    'profile_for',
    'scaled_residual',
    'summarize',
    'Sample',
    'SampleSet',
    'build_sample_set',
    'OmegaProvider',
    'OmegaBatch',
    'HeatOmega',
    'QuadraticOmega',
    'NumericOmega',
    'ShiftedOmega',
    'provider_for',
    'check_first_order',
    'check_second_order',
    'check_second_order_integral',
    'check_lemma_2_4',
    'rate_bound',
    'weighted_laplacian_sum',
    'check_v_convex_ball',
    'check_boundary_normal',
    'sphere_points',
    'check_beta_boundary_limits',
    'beta_decay_residuals',
    'comparison_select',
    'ComparisonResult',
    'c_grid',
    'sup_laplacian',
]
