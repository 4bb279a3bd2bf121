"""
Harnack Bound
=============
Right-hand side u(y, s) (beta(s)/beta(t)) e^{f(x) - f(y) - omega} of the
Harnack inequality, evaluated in log space.
"""

import numpy as np

from .rates import RatePair


def log_harnack_rhs(log_u_ys, rate_pair: RatePair, omega, s, t, f_x=0.0, f_y=0.0):
    """log u(y,s) + log beta(s) - log beta(t) - omega + f(x) - f(y)"""
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any(~(s < t)):
        raise ValueError("Harnack bound requires s < t")
    value = (np.asarray(log_u_ys, dtype=float) + rate_pair.log_beta(s) - rate_pair.log_beta(t)
             - np.asarray(omega, dtype=float) + np.asarray(f_x, dtype=float) - np.asarray(f_y, dtype=float))
    return float(value) if np.ndim(value) == 0 else value


def harnack_rhs(u_ys, rate_pair: RatePair, omega, s, t, f_x=0.0, f_y=0.0):
    """
    Harnack lower bound for u(x, t).

    Args:
        u_ys: Solution value u(y, s) > 0
        rate_pair: (A, beta) pair
        omega: Action omega(x, y; t, s), finite
        s, t: Times with s < t
        f_x, f_y: Drift values f(x), f(y) for the drift form (0 otherwise)

    Returns:
        u(y,s) beta(s)/beta(t) exp(f(x) - f(y) - omega)
    """
    value = np.exp(log_harnack_rhs(np.log(u_ys), rate_pair, omega, s, t, f_x, f_y))
    return float(value) if np.ndim(value) == 0 else value
