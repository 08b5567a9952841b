"""
Model core service

The first-order single-input single-output model: private-sector
composition, feedback composition and classification, seeded stochastic
simulation, AR(1) variance and cobweb dynamics.
"""
from typing import Callable, Tuple

import numpy as np
from loguru import logger

from stabilab.config import get_settings
from stabilab.exceptions import EmptyHorizon, InvalidParameters, NonStationary, Uncontrollable
from stabilab.schemas.model import (
    ClosedLoop,
    CobwebParams,
    CobwebRegime,
    FeedbackClass,
    GainInterval,
    InertialRule,
    PegRule,
    PIDRule,
    PrivateCase,
    PrivateSector,
    ProportionalRule,
    Rule,
    StabilityClass,
    Trajectory,
    Transmission,
)
from stabilab.utils.random import make_rng


# ============================================
# Composition and classification
# ============================================

def compose_private(ps: PrivateSector) -> float:
    """Open-loop persistence A = A' + B'F' left by the private sector's rule."""
    return ps.a_prime + ps.b_prime * ps.f_prime


def private_sector_case(ps: PrivateSector) -> PrivateCase:
    a = compose_private(ps)
    if a < 0.0:
        return PrivateCase.OVERSHOOTING
    if a == 0.0:
        return PrivateCase.ZERO_PERSISTENCE
    if a < 1.0:
        return PrivateCase.STATIONARY_PERSISTENCE
    return PrivateCase.NON_STATIONARY


def stability_of(lam: float) -> StabilityClass:
    """
    Classify a persistence (or spectral radius) by its modulus.

    The unit root is a knife-edge: |lambda| within ``unit_root_tol`` of one.
    """
    tol = get_settings().unit_root_tol
    modulus = abs(lam)
    if modulus == 0.0:
        return StabilityClass.ZERO_PERSISTENCE
    if abs(modulus - 1.0) <= tol:
        return StabilityClass.UNIT_ROOT
    if modulus < 1.0:
        return StabilityClass.STATIONARY
    return StabilityClass.EXPLOSIVE


def _feedback_of(a: float, b: float, f: float) -> FeedbackClass:
    bf = b * f
    lam = a + bf
    if f == 0.0 or bf == 0.0:
        return FeedbackClass.NONE
    if bf < 0.0:
        return FeedbackClass.NEGATIVE if lam >= 0.0 else FeedbackClass.OVERSHOOTING
    return FeedbackClass.POSITIVE


def classify(tr: Transmission, rule: Rule) -> ClosedLoop:
    """
    Compose the closed loop lambda = A + BF and classify it.

    Args:
        tr: Open-loop transmission
        rule: Peg or Proportional rule

    Returns:
        ClosedLoop with the feedback and stability classes

    Raises:
        InvalidParameters: for PID or Inertial rules, whose persistence is a
            companion-matrix spectral radius (see ``classic_control``)
    """
    if not isinstance(rule, (PegRule, ProportionalRule)):
        raise InvalidParameters(
            f"classify handles peg and proportional rules; got '{rule.kind}', "
            "use classic_control.rule_spectral_radius"
        )
    f = rule.gain
    lam = tr.a + tr.b * f
    feedback = _feedback_of(tr.a, tr.b, f)
    if feedback is FeedbackClass.OVERSHOOTING:
        logger.debug(f"Overshooting rule: F={f} drives lambda={lam} below zero")

    return ClosedLoop(
        lam=lam,
        feedback_class=feedback,
        stability_class=stability_of(lam),
        stabilizing_negative_feedback=feedback is FeedbackClass.NEGATIVE and 0.0 <= lam < min(tr.a, 1.0),
    )


def rules_condition(tr: Transmission) -> bool:
    """Stable target dynamics under a peg need 0 <= A < 1."""
    return 0.0 <= tr.a < 1.0


def discretion_condition(tr: Transmission, f: float) -> bool:
    """
    Negative feedback with stability, 0 <= A+BF < min(A, 1).

    With A = 0 no F != 0 qualifies: any response adds persistence.
    """
    if f == 0.0 or tr.b * f >= 0.0:
        return False
    return 0.0 <= tr.a + tr.b * f < min(tr.a, 1.0)


def negative_feedback_interval(tr: Transmission) -> GainInterval:
    """
    Gains F with 0 <= A+BF < min(A, 1), written as an interval on F.

    Raises:
        Uncontrollable: if B = 0
    """
    if tr.b == 0.0:
        raise Uncontrollable()
    if tr.a == 0.0:
        return GainInterval(low=0.0, high=0.0)

    ceiling = min(tr.a, 1.0)
    zero_persistence = -tr.a / tr.b
    bound = (ceiling - tr.a) / tr.b
    if tr.b < 0.0:
        return GainInterval(low=bound, high=zero_persistence, high_closed=True)
    return GainInterval(low=zero_persistence, high=bound, low_closed=True)


# ============================================
# Simulation
# ============================================

def _instrument_law(rule: Rule) -> Callable[[float, float], float]:
    """
    Build the feedback part of the instrument for one simulation.

    The returned callable takes (pi[t], i[t-1]) and keeps whatever memory the
    rule needs (running sum, lagged target) in its closure.
    """
    if isinstance(rule, PegRule):
        return lambda pi_t, i_prev: 0.0

    if isinstance(rule, ProportionalRule):
        f = rule.f
        return lambda pi_t, i_prev: f * pi_t

    if isinstance(rule, PIDRule):
        memory = {"sum": 0.0, "prev": None}

        def pid(pi_t: float, i_prev: float) -> float:
            prev = pi_t if memory["prev"] is None else memory["prev"]
            memory["sum"] += pi_t
            memory["prev"] = pi_t
            return rule.fp * pi_t + rule.fi * memory["sum"] + rule.fd * (pi_t - prev)

        return pid

    if isinstance(rule, InertialRule):
        return lambda pi_t, i_prev: rule.rho_i * i_prev + rule.f_x * pi_t

    raise InvalidParameters(f"Unknown rule kind: {rule!r}")


def simulate_trajectory(
    tr: Transmission,
    rule: Rule,
    pi0: float,
    horizon: int,
    sigma_eta: float = 0.0,
    seed: int = 0,
) -> Trajectory:
    """
    Simulate pi[t+1] = A*pi[t] + B*i[t] + eps[t] with i[t] = rule + eta[t].

    Shocks are Gaussian. Structural shocks are drawn before policy shocks, one
    of each per period including the last, so every series has
    ``horizon + 1`` entries.

    Args:
        tr: Transmission (A, B, sigma_eps)
        rule: Any rule variant
        pi0: Initial target deviation
        horizon: Number of transitions, at least 1
        sigma_eta: Policy shock standard deviation
        seed: Generator seed

    Returns:
        Trajectory

    Raises:
        EmptyHorizon: if horizon < 1
    """
    if horizon < 1:
        raise EmptyHorizon()
    if sigma_eta < 0.0:
        raise InvalidParameters("sigma_eta must be non-negative")

    rng = make_rng(seed)
    n = horizon + 1
    eps = tr.sigma_eps * rng.standard_normal(n)
    eta = sigma_eta * rng.standard_normal(n)

    law = _instrument_law(rule)
    pi = np.empty(n)
    i = np.empty(n)
    pi[0] = pi0
    i_prev = 0.0
    for t in range(n):
        i[t] = law(pi[t], i_prev) + eta[t]
        i_prev = i[t]
        if t < horizon:
            pi[t + 1] = tr.a * pi[t] + tr.b * i[t] + eps[t]

    logger.debug(f"Simulated {horizon} periods of '{rule.kind}' rule with seed {seed}")
    return Trajectory(t=np.arange(n), pi=pi, i=i, eps=eps, eta=eta)


def ar1_variance(lam: float, sigma_eps: float) -> float:
    """
    Unconditional variance sigma_eps^2 / (1 - lambda^2).

    Raises:
        NonStationary: if |lambda| >= 1
    """
    if abs(lam) >= 1.0:
        raise NonStationary(f"|lambda| = {abs(lam)} >= 1 has no stationary variance")
    return sigma_eps ** 2 / (1.0 - lam ** 2)


# ============================================
# Cobweb
# ============================================

def cobweb_regime(bf: float) -> CobwebRegime:
    """
    Regime of the excess-supply recursion e[t+1] = BF*e[t].

    Raises:
        InvalidParameters: if BF > 0 (demand and supply slopes of equal sign)
    """
    tol = get_settings().unit_root_tol
    if bf > 0.0:
        raise InvalidParameters(f"cobweb needs B*F <= 0, got {bf}")
    if bf == 0.0:
        return CobwebRegime.ONE_STEP
    if abs(bf + 1.0) <= tol:
        return CobwebRegime.PERPETUAL
    if bf > -1.0:
        return CobwebRegime.DAMPED
    return CobwebRegime.DIVERGENT


def cobweb_simulate(cw: CobwebParams, horizon: int) -> Tuple[np.ndarray, np.ndarray, CobwebRegime]:
    """
    Iterate the cobweb in excess-supply coordinates.

    Returns:
        tuple: (excess supply e[0..horizon], price p[t] = p* + F*e[t], regime)
    """
    if horizon < 1:
        raise EmptyHorizon()

    bf = cw.b_supply * cw.f_demand
    excess = cw.e0 * bf ** np.arange(horizon + 1)
    price = cw.p_star + cw.f_demand * excess
    return excess, price, cobweb_regime(bf)
