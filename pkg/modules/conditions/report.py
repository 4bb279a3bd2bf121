"""
Condition Reports
=================
Verdicts for sampled inequality checks. A residual is the amount by which
an inequality holds; negative residuals are violations.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

logger = logging.getLogger(__name__)


class ConditionId(str, Enum):
    """Checked hypotheses"""
    INEQ_1_10 = 'ineq_1_10'
    INEQ_1_11 = 'ineq_1_11'
    INEQ_1_12 = 'ineq_1_12'
    BOUNDARY_1_13 = 'boundary_1_13'
    SECOND_ORDER_1_5 = 'second_order_1_5'
    LEMMA_2_4 = 'lemma_2_4'
    V_CONVEX_BALL = 'v_convex_ball'
    BETA_ZERO_LIMIT = 'beta_zero_limit'
    COMPARISON_CERTIFICATE = 'comparison_certificate'
    DIFFERENTIAL_HARNACK = 'differential_harnack'


class Verdict(str, Enum):
    HOLDS = 'holds'
    HOLDS_WITH_EQUALITY = 'holds_with_equality'
    VIOLATED = 'violated'
    INCONCLUSIVE = 'inconclusive'


@dataclass(frozen=True)
class ToleranceProfile:
    """Violation and equality thresholds; scaled residuals are divided by 1 + term size"""
    violation: float
    equality: float
    scaled: bool = False


ANALYTIC = ToleranceProfile(violation=1e-6, equality=1e-8, scaled=False)
NUMERIC = ToleranceProfile(violation=1e-4, equality=1e-4, scaled=True)
QUADRATURE = ToleranceProfile(violation=1e-6, equality=1e-6, scaled=True)


def profile_for(analytic: bool) -> ToleranceProfile:
    return ANALYTIC if analytic else NUMERIC


def scaled_residual(residual: float, terms: Sequence[float], profile: ToleranceProfile) -> float:
    """Residual divided by 1 + sum |terms| when the profile is scaled"""
    if not profile.scaled:
        return float(residual)
    return float(residual) / (1.0 + float(np.sum(np.abs(terms))))


@dataclass
class ConditionReport:
    """Outcome of one sampled condition"""
    condition_id: ConditionId
    sample_count: int
    worst_residual: float
    worst_point: Tuple[Any, ...]
    verdict: Verdict
    tolerance: float
    equality_tolerance: float
    inconclusive_count: int = 0
    notes: List[str] = field(default_factory=list)

    @property
    def violated(self) -> bool:
        return self.verdict == Verdict.VIOLATED

    def to_dict(self) -> Dict[str, Any]:
        return {
            'condition_id': self.condition_id.value,
            'sample_count': self.sample_count,
            'worst_residual': self.worst_residual,
            'worst_point': [_plain(v) for v in self.worst_point],
            'verdict': self.verdict.value,
            'tolerance': self.tolerance,
            'equality_tolerance': self.equality_tolerance,
            'inconclusive_count': self.inconclusive_count,
            'notes': list(self.notes),
        }


def _plain(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    return value


def summarize(condition_id: ConditionId, residuals: Sequence[float], points: Sequence[Tuple],
              profile: ToleranceProfile, inconclusive: int = 0, multimodal: bool = False,
              allow_equality: bool = True, uncertified: Optional[str] = None,
              notes: Optional[List[str]] = None) -> ConditionReport:
    """
    Reduce per-sample residuals to a report.

    Args:
        condition_id: Which hypothesis
        residuals: One residual per evaluated sample (NaN marks a failed sample)
        points: Sample coordinates, aligned with residuals
        profile: Tolerances
        inconclusive: Samples that failed before producing a residual
        multimodal: Any sample crossed a multi-modal action
        allow_equality: Whether holds_with_equality is a meaningful outcome
        uncertified: Reason the claim cannot be certified (e.g. non-C2 potential)
        notes: Extra report notes

    Returns:
        ConditionReport with the worst residual taken in fixed sample order
    """
    notes = list(notes or [])
    values = np.asarray(residuals, dtype=float).reshape(-1)
    finite = np.isfinite(values)
    inconclusive += int((~finite).sum())
    if inconclusive:
        notes.append(f"{inconclusive} sample(s) inconclusive")

    if not finite.any():
        logger.warning(f"{condition_id.value}: no conclusive samples")
        return ConditionReport(condition_id, len(values), float('nan'), (), Verdict.INCONCLUSIVE,
                               profile.violation, profile.equality, inconclusive, notes)

    masked = np.where(finite, values, np.inf)
    index = int(np.argmin(masked))
    worst = float(values[index])
    if worst < -profile.violation:
        verdict = Verdict.VIOLATED
    elif multimodal or uncertified:
        verdict = Verdict.INCONCLUSIVE
        notes.append(uncertified or "multi-modal action: omega may not be differentiable")
    elif allow_equality and float(np.max(np.abs(values[finite]))) <= profile.equality:
        verdict = Verdict.HOLDS_WITH_EQUALITY
    else:
        verdict = Verdict.HOLDS

    report = ConditionReport(
        condition_id=condition_id,
        sample_count=len(values),
        worst_residual=worst,
        worst_point=tuple(points[index]) if len(points) else (),
        verdict=verdict,
        tolerance=profile.violation,
        equality_tolerance=profile.equality,
        inconclusive_count=inconclusive,
        notes=notes,
    )
    logger.info(f"{condition_id.value}: {verdict.value} (worst residual {worst:.3e} over {len(values)} samples)")
    return report
