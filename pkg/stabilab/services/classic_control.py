"""
Classic control service

Pole placement, the IS/accelerationist Phillips transmission with its Taylor
principle bounds, PID and inertial rules on companion matrices, the 1993
Taylor rule and the static closed-loop variance condition.
"""
from typing import Tuple

import numpy as np
import pandas as pd
from loguru import logger

from stabilab.exceptions import DegenerateOpenLoop, InvalidParameters, Uncontrollable
from stabilab.schemas.control import ISPhillips, StaticFriedman, TaylorRule93
from stabilab.schemas.model import (
    GainInterval,
    InertialRule,
    PegRule,
    PIDRule,
    ProportionalRule,
    Rule,
    Trajectory,
    Transmission,
)
from stabilab.services.model_core import simulate_trajectory

TAYLOR_1993 = TaylorRule93()


def pole_placement_gain(tr: Transmission, lambda_target: float) -> float:
    """
    Gain placing the closed-loop pole at ``lambda_target``: F* = (lambda* - A)/B.

    Raises:
        Uncontrollable: if B = 0
    """
    if tr.b == 0.0:
        raise Uncontrollable()
    return (lambda_target - tr.a) / tr.b


def taylor_transmission(isp: ISPhillips) -> Transmission:
    """
    Transmission of the accelerationist Phillips curve: A = 1 + ab, B = -ab.

    Raises:
        Uncontrollable: if a*b = 0
    """
    ab = isp.a_slope * isp.b_is
    if ab == 0.0:
        raise Uncontrollable("Phillips slope of zero leaves the rate without effect on inflation")
    return Transmission(a=1.0 + ab, b=-ab)


def taylor_principle_bounds(isp: ISPhillips) -> GainInterval:
    """
    Open interval (1, -A/B) of inflation responses giving 0 < A+BF < 1.

    The upper end is the gain that removes all persistence, -A/B = (1+ab)/(ab).
    """
    tr = taylor_transmission(isp)
    return GainInterval(low=1.0, high=-tr.a / tr.b)


# ============================================
# Companion matrices
# ============================================

def pid_companion(tr: Transmission, rule: PIDRule) -> np.ndarray:
    """
    Augmented transition matrix of (pi[t], S[t-1], pi[t-1]), S the running sum.

    States the rule does not use are dropped so a pure P rule keeps the
    scalar pole A + B*fp.
    """
    a, b = tr.a, tr.b
    fp, fi, fd = rule.fp, rule.fi, rule.fd
    full = np.array([
        [a + b * (fp + fi + fd), b * fi, -b * fd],
        [1.0, 1.0, 0.0],
        [1.0, 0.0, 0.0],
    ])
    keep = [0]
    if fi != 0.0:
        keep.append(1)
    if fd != 0.0:
        keep.append(2)
    return full[np.ix_(keep, keep)]


def inertial_companion(tr: Transmission, rule: InertialRule) -> np.ndarray:
    """Transition matrix of (pi[t], i[t-1])."""
    return np.array([
        [tr.a + tr.b * rule.f_x, tr.b * rule.rho_i],
        [rule.f_x, rule.rho_i],
    ])


def spectral_radius(matrix: np.ndarray) -> float:
    return float(np.max(np.abs(np.linalg.eigvals(matrix))))


def rule_spectral_radius(tr: Transmission, rule: Rule) -> float:
    """Spectral radius of the closed loop for any rule variant."""
    if isinstance(rule, (PegRule, ProportionalRule)):
        return abs(tr.a + tr.b * rule.gain)
    if isinstance(rule, PIDRule):
        return spectral_radius(pid_companion(tr, rule))
    if isinstance(rule, InertialRule):
        return spectral_radius(inertial_companion(tr, rule))
    raise InvalidParameters(f"Unknown rule kind: {rule!r}")


def pid_simulate(
    tr: Transmission,
    rule: PIDRule,
    pi0: float,
    horizon: int,
    seed: int = 0,
    sigma_eta: float = 0.0,
) -> Tuple[Trajectory, float]:
    """
    Simulate a discrete PID rule and report the augmented spectral radius.

    Returns:
        tuple: (trajectory, spectral radius); stable iff radius < 1
    """
    trajectory = simulate_trajectory(tr, rule, pi0, horizon, sigma_eta=sigma_eta, seed=seed)
    radius = rule_spectral_radius(tr, rule)
    logger.info(f"PID rule fp={rule.fp}, fi={rule.fi}, fd={rule.fd}: spectral radius {radius:.6g}")
    return trajectory, radius


def inertial_simulate(
    tr: Transmission,
    rule: InertialRule,
    pi0: float,
    horizon: int,
    seed: int = 0,
    sigma_eta: float = 0.0,
) -> Tuple[Trajectory, float]:
    trajectory = simulate_trajectory(tr, rule, pi0, horizon, sigma_eta=sigma_eta, seed=seed)
    return trajectory, rule_spectral_radius(tr, rule)


# ============================================
# Taylor rule and the static condition
# ============================================

def taylor_rule_eval(pi: float, x: float) -> float:
    """Nominal rate of the 1993 rule, 1.5*pi + 0.5*x + 1 (annual percent)."""
    return TAYLOR_1993.rate(pi, x)


def taylor_rule_residuals(frame: pd.DataFrame) -> Tuple[pd.Series, float]:
    """
    Discrepancies of observed rates from the 1993 rule.

    Args:
        frame: Columns ``i``, ``pi``, ``x``

    Returns:
        tuple: (residual series, share of rate variance left unexplained)
    """
    predicted = TAYLOR_1993.pi_coef * frame["pi"] + TAYLOR_1993.gap_coef * frame["x"] + TAYLOR_1993.intercept
    residuals = frame["i"] - predicted
    total = float(np.var(frame["i"]))
    share = float(np.var(residuals)) / total if total > 0.0 else 0.0
    return residuals.rename("discretion"), share


def friedman_static_check(sf: StaticFriedman) -> Tuple[float, bool]:
    """
    Closed-loop variance of pi_CL = pi_OL + i and whether it beats the open loop.

    sigma_CL^2 = sigma_OL^2 + sigma_i^2 + 2*rho*sigma_i*sigma_OL; the rule
    stabilizes iff rho < -sigma_i / (2*sigma_OL).

    Raises:
        DegenerateOpenLoop: if sigma_OL = 0
    """
    if sf.sigma_ol == 0.0:
        raise DegenerateOpenLoop()
    open_loop = sf.sigma_ol ** 2
    variance = open_loop + sf.sigma_i ** 2 + 2.0 * sf.rho * sf.sigma_i * sf.sigma_ol
    # rounding can leave -0.0 or a tiny negative at rho = -1
    variance = max(variance, 0.0)
    return variance, variance < open_loop
