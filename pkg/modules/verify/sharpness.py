"""
Sharpness Search
================
For a closed-form kernel and fixed (x, t, s), minimise the Harnack ratio
over the start point y along the line through the kernel centre and x.
Sharp bounds reach ratio 1 on the characteristic set.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from modules.closedform import KernelSpec, RatePair
from modules.conditions import OmegaProvider

from .harnack import harnack_log_ratio

logger = logging.getLogger(__name__)

COARSE_POINTS = 41
CHARACTERISTIC_TOLERANCE = 1e-6
EQUALITY_TOLERANCE = 1e-8


@dataclass
class SharpnessPoint:
    """Minimiser of the ratio over y for one (x, t, s)"""
    x: List[float]
    t: float
    s: float
    y_star: List[float]
    ratio: float
    characteristic_y: List[float]
    characteristic_error: float
    at_bound: bool

    @property
    def on_characteristic(self) -> bool:
        return self.characteristic_error <= CHARACTERISTIC_TOLERANCE

    @property
    def is_equality(self) -> bool:
        return abs(self.ratio - 1.0) <= EQUALITY_TOLERANCE

    def to_dict(self):
        payload = dict(vars(self))
        payload.update(on_characteristic=self.on_characteristic, is_equality=self.is_equality)
        return payload


def _direction(kernel: KernelSpec, x: np.ndarray) -> np.ndarray:
    offset = x - kernel.centre
    norm = float(np.linalg.norm(offset))
    if norm == 0:
        direction = np.zeros(kernel.d)
        direction[0] = 1.0
        return direction
    return offset / norm


def locate(kernel: KernelSpec, rate_pair: RatePair, provider: OmegaProvider, x, t: float, s: float,
           bounds: Tuple[float, float] = (-3.0, 3.0), coarse_points: int = COARSE_POINTS,
           xtol: float = 1e-10) -> SharpnessPoint:
    """
    Minimise the ratio over y = centre + lam * direction for one (x, t, s).

    A coarse scan brackets the minimum and golden-section search refines it.
    A minimum on the edge of bounds is flagged with at_bound.
    """
    if not 0 < s < t:
        raise ValueError(f"sharpness search needs 0 < s < t, got s={s}, t={t}")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    direction = _direction(kernel, x)
    log_u_x = float(kernel.log_value(x, t))

    def point(lam: float) -> np.ndarray:
        return kernel.centre + lam * direction

    def objective(lam: float) -> float:
        y = point(lam)
        omega = provider.omega(x, y, t, s)
        return harnack_log_ratio(log_u_x, float(kernel.log_value(y, s)), rate_pair, omega, t, s)

    grid = np.linspace(bounds[0], bounds[1], coarse_points)
    values = np.array([objective(lam) for lam in grid])
    index = int(np.argmin(values))
    at_bound = index in (0, coarse_points - 1)
    if at_bound:
        logger.warning(f"ratio minimum for x={x.tolist()}, t={t}, s={s} lies on the search bound")
        lam_star, value = float(grid[index]), float(values[index])
    else:
        result = minimize_scalar(objective, bracket=(grid[index - 1], grid[index], grid[index + 1]),
                                 method='golden', options={'xtol': xtol})
        lam_star, value = float(result.x), float(result.fun)

    y_star = point(lam_star)
    characteristic = kernel.characteristic_y(x, t, s)
    error = float(np.max(np.abs(y_star - characteristic)))
    found = SharpnessPoint(x=x.tolist(), t=float(t), s=float(s), y_star=y_star.tolist(),
                           ratio=float(np.exp(value)), characteristic_y=np.asarray(characteristic).tolist(),
                           characteristic_error=error, at_bound=at_bound)
    if found.is_equality and not found.on_characteristic:
        logger.warning(f"equality at y={found.y_star} off the characteristic set (distance {error:.3e})")
    return found


def sharpness_locate(kernel: KernelSpec, rate_pair: RatePair, provider: OmegaProvider,
                     cases: Sequence[Tuple], bounds: Tuple[float, float] = (-3.0, 3.0),
                     coarse_points: int = COARSE_POINTS, xtol: float = 1e-10) -> List[SharpnessPoint]:
    """
    Equality search for several (x, t, s) cases.

    Args:
        kernel: Closed-form solution
        rate_pair: (A, beta) pair
        provider: omega source
        cases: (x, t, s) triples
        bounds: Search range for the signed distance of y from the kernel centre
        coarse_points: Bracketing scan resolution
        xtol: Golden-section tolerance

    Returns:
        One SharpnessPoint per case
    """
    points = [locate(kernel, rate_pair, provider, x, t, s, bounds, coarse_points, xtol) for x, t, s in cases]
    on_set = sum(p.on_characteristic and p.is_equality for p in points)
    logger.info(f"sharpness: {on_set} of {len(points)} minimisers are equality points on the characteristic set")
    return points


def characteristic_cases(kernel: KernelSpec, count: int = 50, seed: int = 0,
                         x_range: Tuple[float, float] = (-2.0, 2.0),
                         t_range: Tuple[float, float] = (0.1, 2.0)) -> List[Tuple[np.ndarray, np.ndarray, float, float]]:
    """Seeded quadruples (x, y, t, s) on the kernel's characteristic set"""
    rng = np.random.default_rng(seed)
    cases = []
    while len(cases) < count:
        s, t = np.sort(rng.uniform(*t_range, size=2))
        if not s < t:
            continue
        x = kernel.centre + rng.uniform(*x_range, size=kernel.d)
        cases.append((x, kernel.characteristic_y(x, float(t), float(s)), float(t), float(s)))
    return cases


def equality_ratios(kernel: KernelSpec, rate_pair: RatePair, provider: OmegaProvider,
                    cases: Optional[Sequence[Tuple]] = None) -> np.ndarray:
    """Harnack ratios at (x, y, t, s) cases, by default on the characteristic set"""
    cases = characteristic_cases(kernel) if cases is None else cases
    ratios = []
    for x, y, t, s in cases:
        omega = provider.omega(x, y, t, s)
        log_ratio = harnack_log_ratio(float(kernel.log_value(x, t)), float(kernel.log_value(y, s)),
                                      rate_pair, omega, t, s)
        ratios.append(np.exp(log_ratio))
    return np.array(ratios)
