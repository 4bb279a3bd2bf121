"""
Hypothesis Checks
=================
Sampled certification of the first- and second-order conditions on omega,
the integral form of the second-order assumption along geodesics, and the
integrated lemma bounding the weighted Laplacians of omega.
"""

import logging
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.integrate import simpson

from modules.action import AgmonResult, OmegaDerivatives, StencilSolveError, parallel_map
from modules.closedform import RatePair
from modules.expr import ScalarField

from .providers import OmegaProvider
from .report import (
    NUMERIC,
    QUADRATURE,
    ConditionId,
    ConditionReport,
    ToleranceProfile,
    profile_for,
    scaled_residual,
    summarize,
)
from .sampling import SampleSet

logger = logging.getLogger(__name__)

_PROVIDER_FAILURES = (StencilSolveError, ValueError, FloatingPointError, ZeroDivisionError)


def _derivatives_for(provider: OmegaProvider, samples: SampleSet, order: int,
                     jobs: int) -> List[Optional[OmegaDerivatives]]:
    def evaluate(sample):
        try:
            return provider.derivatives(sample.x, sample.y, sample.t, sample.s, order)
        except _PROVIDER_FAILURES as exc:
            logger.warning(f"omega derivatives failed at {sample.as_tuple()}: {exc}")
            return None

    return parallel_map(evaluate, samples, jobs)


def check_first_order(provider: OmegaProvider, V: ScalarField, samples: SampleSet,
                      jobs: int = 1, profile: Optional[ToleranceProfile] = None
                      ) -> Tuple[ConditionReport, ConditionReport]:
    """
    Residuals d_t omega + |grad_x omega|^2 - V(x) and d_s omega - |grad_y omega|^2 + V(y).

    Returns:
        (report for the x-inequality, report for the y-inequality)
    """
    profile = profile or profile_for(provider.analytic)
    results = _derivatives_for(provider, samples, 1, jobs)
    forward, backward, points = [], [], []
    multimodal = False
    for sample, derivative in zip(samples, results):
        points.append(sample.as_tuple())
        if derivative is None:
            forward.append(np.nan)
            backward.append(np.nan)
            continue
        multimodal = multimodal or derivative.multimodal
        v_x = float(V.value(sample.x))
        v_y = float(V.value(sample.y))
        grad_x = float(derivative.grad_x @ derivative.grad_x)
        grad_y = float(derivative.grad_y @ derivative.grad_y)
        forward.append(scaled_residual(derivative.dt + grad_x - v_x, [derivative.dt, grad_x, v_x], profile))
        backward.append(scaled_residual(derivative.ds - grad_y + v_y, [derivative.ds, grad_y, v_y], profile))

    return (
        summarize(ConditionId.INEQ_1_10, forward, points, profile, multimodal=multimodal),
        summarize(ConditionId.INEQ_1_11, backward, points, profile, multimodal=multimodal),
    )


def weighted_laplacian_sum(derivative: OmegaDerivatives, A_t: float, A_s: float) -> float:
    """A(t)^2 Lap_x omega + A(s)^2 Lap_y omega + 2 A(t) A(s) sum d2 omega / dx_i dy_i"""
    return A_t ** 2 * derivative.lap_x + A_s ** 2 * derivative.lap_y + 2.0 * A_t * A_s * derivative.mixed_sum


def rate_bound(rate_pair: RatePair, t: float, s: float) -> float:
    """A(t)^2 beta'(t)/beta(t) - A(s)^2 beta'(s)/beta(s)"""
    return (rate_pair.A(t) ** 2 * rate_pair.beta_log_deriv(t)
            - rate_pair.A(s) ** 2 * rate_pair.beta_log_deriv(s))


def check_second_order(provider: OmegaProvider, rate_pair: RatePair, samples: SampleSet,
                       jobs: int = 1, profile: Optional[ToleranceProfile] = None) -> ConditionReport:
    """Residual of the second-order inequality: rate bound minus weighted Laplacian sum"""
    profile = profile or profile_for(provider.analytic)
    results = _derivatives_for(provider, samples, 2, jobs)
    residuals, points = [], []
    multimodal = False
    for sample, derivative in zip(samples, results):
        points.append(sample.as_tuple())
        if derivative is None:
            residuals.append(np.nan)
            continue
        multimodal = multimodal or derivative.multimodal
        lhs = weighted_laplacian_sum(derivative, rate_pair.A(sample.t), rate_pair.A(sample.s))
        rhs = rate_bound(rate_pair, sample.t, sample.s)
        residuals.append(scaled_residual(rhs - lhs, [lhs, rhs], profile))
    return summarize(ConditionId.INEQ_1_12, residuals, points, profile, multimodal=multimodal,
                     notes=[f"rate pair {rate_pair.name}"])


def _integrand_integral(V: ScalarField, rate_pair: RatePair, geodesic: AgmonResult) -> float:
    """
    (t-s) * integral over [0, 1] of (d/2) A'(sigma)^2 + A(sigma)^2 Lap V(gamma),
    sigma = u t + (1 - u) s, by Simpson's rule on the path nodes.
    """
    window = geodesic.window
    u = geodesic.path.parameters
    sigma = u * window.t + (1.0 - u) * window.s
    d = geodesic.path.dim
    integrand = 0.5 * d * np.asarray(rate_pair.A_prime(sigma)) ** 2 \
        + np.asarray(rate_pair.A(sigma)) ** 2 * V.laplacian(geodesic.path.nodes)
    return window.tau * float(simpson(integrand, x=u))


def _as_list(geodesics: Union[AgmonResult, Sequence[AgmonResult]]) -> List[AgmonResult]:
    return [geodesics] if isinstance(geodesics, AgmonResult) else list(geodesics)


def check_second_order_integral(V: ScalarField, rate_pair: RatePair,
                                geodesics: Union[AgmonResult, Sequence[AgmonResult]],
                                profile: ToleranceProfile = QUADRATURE) -> ConditionReport:
    """
    Integral form of the second-order assumption along converged geodesics:
    rate bound minus (t-s) * integral of (d/2) A'^2 + A^2 Lap V(gamma).
    """
    residuals, points = [], []
    skipped = 0
    for geodesic in _as_list(geodesics):
        window = geodesic.window
        points.append((geodesic.path.end.tolist(), geodesic.path.start.tolist(), window.t, window.s))
        if not geodesic.converged:
            skipped += 1
            residuals.append(np.nan)
            continue
        lhs = _integrand_integral(V, rate_pair, geodesic)
        rhs = rate_bound(rate_pair, window.t, window.s)
        residuals.append(scaled_residual(rhs - lhs, [lhs, rhs], profile))
    uncertified = None if V.is_c2 else "potential is not C2; Laplacian V is not certified"
    notes = [f"rate pair {rate_pair.name}"]
    if skipped:
        notes.append(f"{skipped} geodesic(s) not converged")
    return summarize(ConditionId.SECOND_ORDER_1_5, residuals, points, profile,
                     uncertified=uncertified, notes=notes)


def check_lemma_2_4(V: ScalarField, rate_pair: RatePair,
                    geodesics: Union[AgmonResult, Sequence[AgmonResult]],
                    derivatives: Union[OmegaDerivatives, Sequence[Optional[OmegaDerivatives]]],
                    profile: ToleranceProfile = NUMERIC) -> ConditionReport:
    """
    Weighted Laplacian sum of omega at (x, y, t, s) against the integral of
    (d/2) A'(sigma)^2 + A(sigma)^2 Lap V(gamma(sigma)) over sigma in [s, t].

    Takes one geodesic with its omega derivatives, or aligned lists of both;
    a None derivative marks a failed provider evaluation.
    """
    geodesics = _as_list(geodesics)
    if isinstance(derivatives, OmegaDerivatives):
        derivatives = [derivatives]
    derivatives = list(derivatives)
    if len(derivatives) != len(geodesics):
        raise ValueError(f"{len(geodesics)} geodesics but {len(derivatives)} omega derivatives")

    residuals, points, margins = [], [], []
    multimodal = False
    for geodesic, derived in zip(geodesics, derivatives):
        window = geodesic.window
        points.append((geodesic.path.end.tolist(), geodesic.path.start.tolist(), window.t, window.s))
        if not geodesic.converged or derived is None:
            residuals.append(np.nan)
            continue
        lhs = weighted_laplacian_sum(derived, rate_pair.A(window.t), rate_pair.A(window.s))
        rhs = _integrand_integral(V, rate_pair, geodesic)
        residuals.append(scaled_residual(rhs - lhs, [lhs, rhs], profile))
        margins.append((lhs, rhs))
        multimodal = multimodal or derived.multimodal

    if not margins:
        return summarize(ConditionId.LEMMA_2_4, residuals, points, profile)
    uncertified = None if V.is_c2 else "potential is not C2; Laplacian V is not certified"
    if len(geodesics) == 1:
        lhs, rhs = margins[0]
        notes = [f"lhs={lhs!r}", f"rhs={rhs!r}", f"margin={rhs - lhs!r}"]
    else:
        notes = [f"margin={min(rhs - lhs for lhs, rhs in margins)!r} (smallest of {len(margins)})"]
    return summarize(ConditionId.LEMMA_2_4, residuals, points, profile,
                     multimodal=multimodal, uncertified=uncertified, notes=notes)
