"""
Harnack Scan
============
Evaluates u(x, t) against u(y, s) (beta(s)/beta(t)) e^{f(x) - f(y) - omega}
over sampled quadruples, in log space throughout.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from modules.closedform import KernelSpec, RatePair, log_harnack_rhs
from modules.conditions import OmegaProvider
from modules.expr import PotentialExpr, differentiate
from modules.pde import GridSolution

from .sampler import (
    Quadruple,
    SamplerConfig,
    config_hash,
    sample_grid_quadruples,
    sample_kernel_quadruples,
)

logger = logging.getLogger(__name__)

SHARPNESS_KEEP = 10

Subject = Union[GridSolution, KernelSpec]


class HarnackVerdict(str, Enum):
    PASS = 'pass'
    FAIL = 'fail'
    INCONCLUSIVE = 'inconclusive'


@dataclass
class Violation:
    x: List[float]
    y: List[float]
    t: float
    s: float
    ratio: float


@dataclass
class HarnackReport:
    """
    Aggregated scan. ratios holds one entry per evaluated quadruple (NaN for
    skipped ones), so violations at any tolerance can be recomputed.
    """
    quadruple_count: int
    min_ratio: float
    violations: List[Violation]
    sharpness: List[Tuple[Tuple, float]]
    config_hash: str
    tolerance: float
    verdict: HarnackVerdict
    skipped_count: int = 0
    triaged_count: int = 0
    quadruples: List[Quadruple] = field(default_factory=list, repr=False)
    ratios: np.ndarray = field(default_factory=lambda: np.zeros(0), repr=False)
    config: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict == HarnackVerdict.PASS

    def violations_at(self, tolerance: float) -> List[Violation]:
        """Violations for another tolerance; nonincreasing as the tolerance grows"""
        return [
            Violation(q.x.tolist(), q.y.tolist(), q.t, q.s, float(r))
            for q, r in zip(self.quadruples, self.ratios)
            if np.isfinite(r) and r < 1.0 - tolerance
        ]

    def to_frame(self) -> pd.DataFrame:
        """Flat table x, y, t, s, ratio (x1.., y1.. columns for d > 1)"""
        if not self.quadruples:
            return pd.DataFrame(columns=['x', 'y', 't', 's', 'ratio'])
        dim = self.quadruples[0].x.size
        x_names = ['x'] if dim == 1 else [f"x{i + 1}" for i in range(dim)]
        y_names = ['y'] if dim == 1 else [f"y{i + 1}" for i in range(dim)]
        rows = [list(q.x) + list(q.y) + [q.t, q.s, float(r)] for q, r in zip(self.quadruples, self.ratios)]
        return pd.DataFrame(rows, columns=x_names + y_names + ['t', 's', 'ratio'])

    def to_dict(self) -> Dict[str, Any]:
        return {
            'quadruple_count': self.quadruple_count,
            'min_ratio': self.min_ratio,
            'violations': [vars(v) for v in self.violations],
            'sharpness': [{'quadruple': list(q), 'gap': gap} for q, gap in self.sharpness],
            'config_hash': self.config_hash,
            'tolerance': self.tolerance,
            'verdict': self.verdict.value,
            'skipped_count': self.skipped_count,
            'triaged_count': self.triaged_count,
        }


def harnack_log_ratio(log_u_x, log_u_y, rate_pair: RatePair, omega, t, s, f_x=0.0, f_y=0.0):
    """log u(x,t) - log rhs; non-negative when the inequality holds"""
    rhs = log_harnack_rhs(log_u_y, rate_pair, omega, s, t, f_x, f_y)
    value = np.asarray(log_u_x, dtype=float) - np.asarray(rhs, dtype=float)
    return float(value) if np.ndim(value) == 0 else value


def log_values(subject: Subject, points: np.ndarray, times: np.ndarray) -> np.ndarray:
    """log u at (points[i], times[i]); bilinear interpolation for grids"""
    points = np.asarray(points, dtype=float)
    times = np.asarray(times, dtype=float)
    if isinstance(subject, KernelSpec):
        return np.asarray(subject.log_value(points, times), dtype=float)
    result = np.empty(len(times))
    for t in np.unique(times):
        mask = times == t
        values = subject.interpolate(points[mask], float(t))
        with np.errstate(divide='ignore'):
            result[mask] = np.log(values)
    return result


def _subject_dim(subject: Subject) -> int:
    return subject.d if isinstance(subject, KernelSpec) else subject.grid.d


def _describe(subject: Subject) -> Dict[str, Any]:
    if isinstance(subject, KernelSpec):
        return {'kind': subject.kind.value, 'd': subject.d, 'C1': subject.C1, 'C2': subject.C2,
                'a': list(subject.a) if subject.a else None}
    grid = subject.grid
    return {'kind': 'grid', 'd': grid.d, 'extents': [list(e) for e in grid.extents], 'nx': grid.nx,
            'dt': grid.dt, 'times': subject.times, 'potential': str(subject.potential),
            'scheme': subject.scheme.value}


def _ratios(subject: Subject, quadruples: Sequence[Quadruple], rate_pair: RatePair,
            omega: np.ndarray, drift: Optional[PotentialExpr]) -> np.ndarray:
    X = np.array([q.x for q in quadruples])
    Y = np.array([q.y for q in quadruples])
    T = np.array([q.t for q in quadruples])
    S = np.array([q.s for q in quadruples])
    f_x = f_y = 0.0
    if drift is not None:
        f_field = differentiate(drift)
        f_x, f_y = f_field.value(X), f_field.value(Y)
    log_ratio = harnack_log_ratio(log_values(subject, X, T), log_values(subject, Y, S),
                                  rate_pair, omega, T, S, f_x, f_y)
    with np.errstate(over='ignore'):
        return np.exp(np.atleast_1d(log_ratio))


def harnack_scan(subject: Subject, rate_pair: RatePair, provider: OmegaProvider,
                 sampler: Optional[SamplerConfig] = None, tolerance: float = 1e-9,
                 drift: Optional[PotentialExpr] = None, quadruples: Optional[Sequence[Quadruple]] = None,
                 extents: Optional[Sequence[Tuple[float, float]]] = None, jobs: int = 1,
                 triage: bool = True) -> HarnackReport:
    """
    Harnack inequality over sampled quadruples.

    Args:
        subject: GridSolution or closed-form KernelSpec
        rate_pair: (A, beta) pair
        provider: omega source; failures skip the quadruple
        sampler: Sampling settings (count, seed, exclusion)
        tolerance: Ratios below 1 - tolerance are violations
        drift: Drift potential f for the drift form of the bound
        quadruples: Explicit quadruples instead of sampling
        extents: Kernel sampling box (default [-3, 3]^d)
        jobs: Workers for omega evaluation
        triage: Re-check grid violations on a solution at twice the resolution

    Returns:
        HarnackReport; verdict pass iff min_ratio >= 1 - tolerance
    """
    sampler = sampler or SamplerConfig()
    explicit = quadruples is not None
    dim = _subject_dim(subject)
    if extents is None:
        extents = [(-3.0, 3.0)] * dim if isinstance(subject, KernelSpec) else list(subject.grid.extents)
    if quadruples is None:
        if isinstance(subject, KernelSpec):
            quadruples = sample_kernel_quadruples(extents, sampler)
        else:
            quadruples = sample_grid_quadruples(subject, sampler)
    quadruples = list(quadruples)

    X = np.array([q.x for q in quadruples])
    Y = np.array([q.y for q in quadruples])
    T = np.array([q.t for q in quadruples])
    S = np.array([q.s for q in quadruples])
    batch = provider.omega_batch(X, Y, T, S, jobs=jobs)
    skipped = int(batch.failed.sum())
    if skipped:
        logger.warning(f"{skipped} quadruple(s) skipped: omega evaluation failed")

    ratios = np.full(len(quadruples), np.nan)
    usable = ~batch.failed
    if usable.any():
        kept = [q for q, ok in zip(quadruples, usable) if ok]
        ratios[usable] = _ratios(subject, kept, rate_pair, batch.values[usable], drift)

    triaged = 0
    flagged = np.flatnonzero(np.isfinite(ratios) & (ratios < 1.0 - tolerance))
    if triage and flagged.size and isinstance(subject, GridSolution):
        logger.warning(f"{flagged.size} violation(s) at nx={subject.grid.nx}; re-checking at twice the resolution")
        refined = subject.refined()
        rechecked = _ratios(refined, [quadruples[i] for i in flagged], rate_pair, batch.values[flagged], drift)
        ratios[flagged] = rechecked
        triaged = int(np.sum(rechecked >= 1.0 - tolerance))
        if triaged:
            logger.info(f"{triaged} violation(s) cleared at the finer resolution")

    finite = np.isfinite(ratios)
    min_ratio = float(np.min(ratios[finite])) if finite.any() else float('nan')
    if not finite.any():
        verdict = HarnackVerdict.INCONCLUSIVE
    elif min_ratio >= 1.0 - tolerance:
        verdict = HarnackVerdict.PASS
    else:
        verdict = HarnackVerdict.FAIL

    order = np.argsort(np.where(finite, np.abs(ratios - 1.0), np.inf), kind='stable')
    sharpness = [(quadruples[i].as_tuple(), float(abs(ratios[i] - 1.0))) for i in order[:SHARPNESS_KEEP] if finite[i]]

    config = {
        'subject': _describe(subject),
        'rate_pair': rate_pair.name,
        'omega_source': provider.name,
        'drift': str(drift) if drift is not None else None,
        'tolerance': tolerance,
        'sampler': None if explicit else sampler.to_dict(),
        'explicit_quadruples': [q.as_tuple() for q in quadruples] if explicit else None,
    }
    report = HarnackReport(
        quadruple_count=len(quadruples),
        min_ratio=min_ratio,
        violations=[],
        sharpness=sharpness,
        config_hash=config_hash(config),
        tolerance=tolerance,
        verdict=verdict,
        skipped_count=skipped,
        triaged_count=triaged,
        quadruples=quadruples,
        ratios=ratios,
        config=config,
    )
    report.violations = report.violations_at(tolerance)
    logger.info(f"harnack scan: {verdict.value}, min ratio {min_ratio!r} over {len(quadruples)} quadruples, "
                f"{len(report.violations)} violation(s)")
    return report
