"""
Rate Pairs
==========
Strictly increasing functions (A, beta) entering the second-order
hypothesis and the prefactor beta(s)/beta(t) of the Harnack bound.
"""

import logging
from dataclasses import dataclass
from typing import Callable, List

import numpy as np

from .kernels import coth, log_sinh

logger = logging.getLogger(__name__)


def _vectorised(func: Callable) -> Callable:
    def wrapper(t):
        value = func(np.asarray(t, dtype=float))
        return float(value) if np.ndim(value) == 0 else value
    return wrapper


@dataclass(frozen=True)
class RatePair:
    """A, A', beta, beta'/beta and log beta as vectorised callables"""
    name: str
    A: Callable
    A_prime: Callable
    beta: Callable
    beta_log_deriv: Callable
    log_beta: Callable

    def validate(self, t_max: float = 10.0, samples: int = 100, delta: float = 1e-6) -> List[str]:
        """
        Check monotonicity of A and beta and beta(0+) -> 0 on a sampled grid.

        Returns:
            List of error messages (empty when the pair is admissible)
        """
        errors = []
        grid = np.linspace(t_max / samples, t_max, samples)
        if not np.all(np.asarray(self.A(grid + delta)) > np.asarray(self.A(grid))):
            errors.append(f"{self.name}: A is not strictly increasing on (0, {t_max}]")
        if not np.all(np.asarray(self.log_beta(grid + delta)) > np.asarray(self.log_beta(grid))):
            errors.append(f"{self.name}: beta is not strictly increasing on (0, {t_max}]")
        if not self.beta(1e-6) < 1e-2 * self.beta(1.0):
            errors.append(f"{self.name}: beta does not decay towards 0 at 0+")
        return errors


def rate_pair_heat(d: int) -> RatePair:
    """A(t) = t, beta(t) = t^(d/2); beta'/beta = d/(2t)"""
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    return RatePair(
        name='heat',
        A=_vectorised(lambda t: t),
        A_prime=_vectorised(lambda t: np.ones_like(t)),
        beta=_vectorised(lambda t: t ** (d / 2.0)),
        beta_log_deriv=_vectorised(lambda t: d / (2.0 * t)),
        log_beta=_vectorised(lambda t: (d / 2.0) * np.log(t)),
    )


def rate_pair_quadratic(d: int, C1: float) -> RatePair:
    """A(t) = sinh(2 C1 t), beta(t) = sinh(2 C1 t)^(d/2); beta'/beta = d C1 coth(2 C1 t)"""
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    if not C1 > 0:
        raise ValueError(f"quadratic rate pair requires C1 > 0, got {C1}")
    c = float(C1)
    return RatePair(
        name=f'quadratic(C={c!r})',
        A=_vectorised(lambda t: np.sinh(2.0 * c * t)),
        A_prime=_vectorised(lambda t: 2.0 * c * np.cosh(2.0 * c * t)),
        beta=_vectorised(lambda t: np.sinh(2.0 * c * t) ** (d / 2.0)),
        beta_log_deriv=_vectorised(lambda t: d * c * coth(2.0 * c * t)),
        log_beta=_vectorised(lambda t: (d / 2.0) * log_sinh(2.0 * c * t)),
    )


def rate_pair_power(d: int, exponent: float) -> RatePair:
    """A(t) = t, beta(t) = t^exponent; used for perturbed pairs"""
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    p = float(exponent)
    return RatePair(
        name=f'power({p!r})',
        A=_vectorised(lambda t: t),
        A_prime=_vectorised(lambda t: np.ones_like(t)),
        beta=_vectorised(lambda t: t ** p),
        beta_log_deriv=_vectorised(lambda t: p / t),
        log_beta=_vectorised(lambda t: p * np.log(t)),
    )
