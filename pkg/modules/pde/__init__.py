"""
PDE Module
==========
Positive numerical solutions used as Harnack test subjects.

This module handles:
1. Box grids (d = 1, 2) and initial data presets
2. Crank-Nicolson / backward Euler stepping with Neumann faces
3. The drift equation through v = e^{-f} u
4. Step size suggestions and boundary flux diagnostics
"""

from .grid import BoxGrid, InitialData, InitialKind
from .solver import (
    GridSolution,
    NonPositiveSolutionError,
    Scheme,
    SingularSystemError,
    neumann_flux,
    neumann_laplacian,
    solve,
    solve_drift,
    stability_probe,
)

__all__ = [
    'BoxGrid',
    'InitialData',
    'InitialKind',
    'GridSolution',
    'Scheme',
    'NonPositiveSolutionError',
    'SingularSystemError',
    'solve',
    'solve_drift',
    'stability_probe',
    'neumann_flux',
    'neumann_laplacian',
]
