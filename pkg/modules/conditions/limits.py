"""
Boundary Limits
===============
beta(0+) = 0, omega -> infinity as t -> s+ for x != y, and a non-negative
diagonal limit of omega, sampled on shrinking time gaps.
"""

import logging
from typing import List, Sequence, Tuple

import numpy as np

from modules.closedform import RatePair

from .providers import OmegaProvider
from .report import ConditionId, ConditionReport, profile_for, scaled_residual, summarize

logger = logging.getLogger(__name__)

BETA_TIMES = (1e-2, 1e-4, 1e-6)
OMEGA_GAPS = (1e-1, 1e-2, 1e-3)


def beta_decay_residuals(rate_pair: RatePair, times: Sequence[float] = BETA_TIMES) -> List[float]:
    """
    Residuals for monotone decay of beta towards 0: one per consecutive pair
    of sample times, plus the overall decay beta(t_last)/beta(t_first) <= 0.1.
    """
    values = np.array([rate_pair.beta(t) for t in times], dtype=float)
    residuals = [float(values[i] - values[i + 1]) for i in range(len(values) - 1)]
    if values[0] > 0:
        residuals.append(float(0.1 - values[-1] / values[0]))
    else:
        residuals.append(-1.0)
    return residuals


def check_beta_boundary_limits(rate_pair: RatePair, provider: OmegaProvider,
                               pairs: Sequence[Tuple[Sequence[float], Sequence[float]]],
                               s: float = 1.0, alpha: float = 0.0,
                               gaps: Sequence[float] = OMEGA_GAPS) -> ConditionReport:
    """
    Sample the limits at t -> s+.

    For x != y omega must dominate |x - y|^2 / (4 gap) - alpha gap and grow as
    the gap shrinks; for x = y omega + alpha gap must stay non-negative.

    Args:
        rate_pair: Pair whose beta is sampled near 0
        provider: Source of omega
        pairs: (x, y) endpoint pairs
        s: Start time of every window
        alpha: Lower-bound shift of the potential
        gaps: Decreasing time gaps t - s

    Returns:
        ConditionReport for beta_zero_limit
    """
    profile = profile_for(provider.analytic)
    residuals: List[float] = []
    points: List[Tuple] = []
    residuals.extend(beta_decay_residuals(rate_pair))
    points.extend(('beta', BETA_TIMES[i], BETA_TIMES[i + 1]) for i in range(len(BETA_TIMES) - 1))
    points.append(('beta_decay', BETA_TIMES[0], BETA_TIMES[-1]))

    for x, y in pairs:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        y = np.atleast_1d(np.asarray(y, dtype=float))
        distance = float(np.sum((x - y) ** 2))
        previous = None
        for gap in gaps:
            point = (x.tolist(), y.tolist(), s + gap, s)
            try:
                value = provider.omega(x, y, s + gap, s)
            except (ValueError, RuntimeError) as exc:
                logger.warning(f"omega failed near the diagonal at {point}: {exc}")
                residuals.append(np.nan)
                points.append(point)
                continue
            if distance > 0:
                bound = distance / (4.0 * gap) - alpha * gap
                residuals.append(scaled_residual(value - bound, [value, bound], profile))
                points.append(point)
                if previous is not None:
                    residuals.append(value - previous)
                    points.append(point)
                previous = value
            else:
                residuals.append(value + alpha * gap)
                points.append(point)

    return summarize(ConditionId.BETA_ZERO_LIMIT, residuals, points, profile, allow_equality=False,
                     notes=[f"beta sampled at {list(BETA_TIMES)}", f"omega gaps {list(gaps)}"])
