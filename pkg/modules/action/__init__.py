"""
Action Module
=============
Energy functional, V-geodesics and the Agmon action omega(x, y; t, s).

This module handles:
1. Discrete energy, its gradient and the Euler-Lagrange residual
2. Geodesic solves (direct, shooting, lattice oracle)
3. Finite-difference derivatives of omega
4. Order-preserving parallel evaluation
"""

from .path import PathDiscretization, TimeWindow, as_point, straight_path
from .energy import (
    el_residual,
    energy,
    energy_gradient,
    geodesic_velocity,
    reparametrized_energy,
    residual_norm,
)
from .lattice import LatticeError, LatticeSpec, aligned_lattice, lattice_geodesic, omega_oracle_dp
from .geodesic import AgmonResult, SolveMethod, SolverOptions, SolveStatus, solve_geodesic
from .derivatives import OmegaDerivatives, StencilSolveError, omega_derivatives
from .workers import default_jobs, parallel_map

__all__ = [
    'PathDiscretization',
    'TimeWindow',
    'as_point',
    'straight_path',
    'energy',
    'reparametrized_energy',
    'el_residual',
    'energy_gradient',
    'residual_norm',
    'geodesic_velocity',
    'LatticeSpec',
    'LatticeError',
    'aligned_lattice',
    'lattice_geodesic',
    'omega_oracle_dp',
    'AgmonResult',
    'SolveMethod',
    'SolveStatus',
    'SolverOptions',
    'solve_geodesic',
    'OmegaDerivatives',
    'StencilSolveError',
    'omega_derivatives',
    'parallel_map',
    'default_jobs',
]
