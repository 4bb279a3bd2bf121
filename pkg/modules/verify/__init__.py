"""
Verify Module
=============
Harnack inequality checks on kernels and numerical solutions.

This module handles:
1. Seeded quadruple sampling with the short-time/long-jump exclusion
2. Harnack ratio scans with violation triage on refined grids
3. Sharpness search along the characteristic set
4. The differential Harnack inequality
5. Nested-box stabilisation probes
"""

from .sampler import (
    Quadruple,
    SamplerConfig,
    box_radius,
    config_hash,
    is_excluded,
    make_quadruples,
    sample_grid_quadruples,
    sample_kernel_quadruples,
)
from .harnack import (
    HarnackReport,
    HarnackVerdict,
    Violation,
    harnack_log_ratio,
    harnack_scan,
    log_values,
)
from .sharpness import (
    SharpnessPoint,
    characteristic_cases,
    equality_ratios,
    locate,
    sharpness_locate,
)
from .differential import differential_harnack, log_laplacian_grid
from .nested import nested_domain_probe

__all__ = [
    'Quadruple',
    'SamplerConfig',
    'box_radius',
    'config_hash',
    'is_excluded',
    'make_quadruples',
    'sample_grid_quadruples',
    'sample_kernel_quadruples',
    'HarnackReport',
    'HarnackVerdict',
    'Violation',
    'harnack_log_ratio',
    'harnack_scan',
    'log_values',
    'SharpnessPoint',
    'characteristic_cases',
    'equality_ratios',
    'locate',
    'sharpness_locate',
    'differential_harnack',
    'log_laplacian_grid',
    'nested_domain_probe',
]
