"""
Optimal control service

Scalar discounted LQR by Riccati value iteration, closed-loop losses of
arbitrary proportional gains, the optimal persistence curve, minimax gains
for an uncertain instrument effect and certainty-equivalent control on a
Kalman-filtered state.
"""
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger
from scipy import linalg, optimize

from stabilab.config import get_settings
from stabilab.exceptions import (
    EmptyHorizon,
    InvalidParameters,
    NoConvergence,
    NoRobustStabilizer,
    UnboundedLoss,
    Uncontrollable,
)
from stabilab.schemas.control import LossSpec, LQGResult, RiccatiSolution
from stabilab.schemas.estimation import KalmanState
from stabilab.schemas.model import GainInterval, Trajectory, Transmission
from stabilab.services.estimation import kalman_step
from stabilab.utils.random import make_rng

PEG_TOLERANCE = 1e-8


# ============================================
# Helper Functions
# ============================================

def _riccati_map(p: float, a: float, b: float, ls: LossSpec) -> float:
    """One step of p <- q + beta*A^2*p - (beta*A*B*p)^2 / (r + beta*B^2*p)."""
    beta = ls.beta
    return ls.q + beta * a * a * p - (beta * a * b * p) ** 2 / (ls.r + beta * b * b * p)


def _gain_from_value(p: float, a: float, b: float, ls: LossSpec) -> float:
    return -ls.beta * a * b * p / (ls.r + ls.beta * b * b * p)


def _is_stabilizing(lam: float, beta: float) -> bool:
    return beta * lam * lam < 1.0


def _uncontrolled_solution(a: float, ls: LossSpec) -> RiccatiSolution:
    """B = 0: the loss is whatever the open loop delivers."""
    discounted = ls.beta * a * a
    if discounted >= 1.0:
        raise UnboundedLoss(f"B = 0 and beta*A^2 = {discounted} >= 1")
    p = ls.q / (1.0 - discounted)
    return RiccatiSolution(
        p=p, f_star=0.0, lambda_star=a, iterations=0, converged=True, residual=0.0, method="closed_form",
    )


def _scipy_value(a: float, b: float, ls: LossSpec) -> Optional[float]:
    """Discounted scalar DARE through scipy on the scaled system (sqrt(beta)*A, sqrt(beta)*B)."""
    root_beta = math.sqrt(ls.beta)
    try:
        x = linalg.solve_discrete_are(
            np.array([[root_beta * a]]),
            np.array([[root_beta * b]]),
            np.array([[ls.q]]),
            np.array([[ls.r]]),
        )
    except (ValueError, np.linalg.LinAlgError) as e:
        logger.debug(f"scipy DARE cross-check unavailable: {e}")
        return None
    return float(x[0, 0])


# ============================================
# Riccati
# ============================================

def closed_form_lqr(a: float, b: float, ls: LossSpec) -> RiccatiSolution:
    """
    Stabilizing root of beta*B^2*p^2 + [r(1 - beta*A^2) - q*beta*B^2]*p - q*r = 0.

    Raises:
        UnboundedLoss: if no stabilizing solution exists
    """
    if b == 0.0:
        return _uncontrolled_solution(a, ls)

    c2 = ls.beta * b * b
    c1 = ls.r * (1.0 - ls.beta * a * a) - ls.q * c2
    root = math.sqrt(c1 * c1 + 4.0 * c2 * ls.q * ls.r)
    # larger root, written without cancellation when c1 > 0
    p = 2.0 * ls.q * ls.r / (root + c1) if c1 > 0.0 else (root - c1) / (2.0 * c2)

    f = _gain_from_value(p, a, b, ls)
    lam = a + b * f
    if not _is_stabilizing(lam, ls.beta):
        raise UnboundedLoss(f"no stabilizing Riccati solution (beta*lambda^2 = {ls.beta * lam * lam})")
    return RiccatiSolution(
        p=p,
        f_star=f,
        lambda_star=lam,
        iterations=0,
        converged=True,
        residual=abs(p - _riccati_map(p, a, b, ls)),
        method="closed_form",
    )


def solve_lqr(
    a: float,
    b: float,
    ls: LossSpec,
    tol: Optional[float] = None,
    max_iter: Optional[int] = None,
) -> RiccatiSolution:
    """
    Scalar discounted LQR for persistence ``a`` and effect ``b`` by value iteration from p = q.

    ``a`` may be any real, so a planner can solve for a perceived persistence
    that is not a valid open-loop transmission.
    """
    settings = get_settings()
    tol = settings.riccati_tol if tol is None else tol
    max_iter = settings.riccati_max_iter if max_iter is None else max_iter

    if b == 0.0:
        return _uncontrolled_solution(a, ls)
    if ls.q == 0.0 and ls.beta * a * a == 1.0:
        raise UnboundedLoss("q = 0 with beta*A^2 = 1 leaves the loss without a stabilizing minimizer")

    p = ls.q
    iterations = 0
    converged = False
    while iterations < max_iter:
        iterations += 1
        p_next = _riccati_map(p, a, b, ls)
        if abs(p_next - p) <= tol * max(1.0, abs(p_next)):
            p = p_next
            converged = True
            break
        p = p_next

    if not converged:
        raise NoConvergence(f"Riccati iteration did not converge in {max_iter} steps")

    f = _gain_from_value(p, a, b, ls)
    lam = a + b * f
    if not _is_stabilizing(lam, ls.beta):
        logger.info(f"Value iteration settled on a non-stabilizing p={p}; using the closed-form root")
        return closed_form_lqr(a, b, ls)

    reference = closed_form_lqr(a, b, ls).p
    if abs(reference - p) > math.sqrt(tol) * max(1.0, p):
        logger.warning(f"Riccati value iteration p={p} disagrees with closed form p={reference}")
    scipy_p = _scipy_value(a, b, ls)
    if scipy_p is not None and abs(scipy_p - p) > math.sqrt(tol) * max(1.0, p):
        logger.warning(f"Riccati value iteration p={p} disagrees with scipy p={scipy_p}")

    logger.debug(f"Riccati converged in {iterations} iterations: p={p}, F*={f}, lambda*={lam}")
    return RiccatiSolution(
        p=p,
        f_star=f,
        lambda_star=lam,
        iterations=iterations,
        converged=True,
        residual=abs(p - _riccati_map(p, a, b, ls)),
    )


def riccati_closed_form(tr: Transmission, ls: LossSpec) -> RiccatiSolution:
    return closed_form_lqr(tr.a, tr.b, ls)


def riccati_solve(
    tr: Transmission,
    ls: LossSpec,
    tol: Optional[float] = None,
    max_iter: Optional[int] = None,
) -> RiccatiSolution:
    """
    Solve the scalar discounted LQR by value iteration from p = q.

    The answer is cross-checked against the closed-form root; when q = 0 the
    iteration can settle on the non-stabilizing fixed point p = 0 and the
    closed-form root is returned instead.

    Args:
        tr: Transmission (A, B)
        ls: Loss weights and discount
        tol: Relative convergence tolerance (defaults to settings)
        max_iter: Iteration cap (defaults to settings)

    Returns:
        RiccatiSolution with the stabilizing value p and gain F*

    Raises:
        UnboundedLoss: if beta*A^2 >= 1 with nothing to stabilize it
        NoConvergence: if the iteration cap is reached
    """
    return solve_lqr(tr.a, tr.b, ls, tol=tol, max_iter=max_iter)


def optimal_persistence_curve(tr: Transmission, beta: float, ratio_grid: Sequence[float]) -> List[float]:
    """
    Optimal closed-loop persistence lambda* as a function of R/Q.

    Q is normalised to one; lambda* rises with the price put on moving the
    instrument.
    """
    if any(ratio <= 0.0 for ratio in ratio_grid):
        raise InvalidParameters("loss ratios R/Q must be positive")
    return [riccati_solve(tr, LossSpec(q=1.0, r=float(ratio), beta=beta)).lambda_star for ratio in ratio_grid]


def rationalize_persistence(tr: Transmission, beta: float, lambda_target: float) -> float:
    """
    Loss ratio R/Q whose optimal persistence equals ``lambda_target``.

    Admissible targets lie strictly between 0 and min(A, 1/(beta*A)).

    Raises:
        Uncontrollable: if B = 0
        InvalidParameters: if the target is outside the reachable range
    """
    if tr.b == 0.0:
        raise Uncontrollable()

    def gap(log_ratio: float) -> float:
        ls = LossSpec(q=1.0, r=math.exp(log_ratio), beta=beta)
        return riccati_solve(tr, ls).lambda_star - lambda_target

    low, high = -20.0, 20.0
    if not gap(low) < 0.0 < gap(high):
        raise InvalidParameters(f"persistence {lambda_target} is not reachable by any loss ratio")
    return math.exp(optimize.brentq(gap, low, high, xtol=1e-12))


# ============================================
# Losses
# ============================================

def policy_loss(tr: Transmission, ls: LossSpec, f: float, pi0: float) -> float:
    """
    Discounted loss of the rule i = F*pi from pi0 without shocks.

    L = 1/2 * (q + r*F^2) * pi0^2 / (1 - beta*(A + B*F)^2), +inf when the
    discounted closed loop does not decay.
    """
    if pi0 == 0.0:
        return 0.0
    lam = tr.a + tr.b * f
    denominator = 1.0 - ls.beta * lam * lam
    if denominator <= 0.0:
        return math.inf
    return 0.5 * (ls.q + ls.r * f * f) * pi0 * pi0 / denominator


def policy_loss_grid(a: float, b_values: np.ndarray, f_values: np.ndarray, ls: LossSpec, pi0: float) -> np.ndarray:
    """Loss matrix with one row per gain and one column per instrument effect."""
    f = np.asarray(f_values, dtype=float)[:, None]
    b = np.asarray(b_values, dtype=float)[None, :]
    if pi0 == 0.0:
        return np.zeros((f.shape[0], b.shape[1]))
    denominator = 1.0 - ls.beta * (a + b * f) ** 2
    numerator = 0.5 * (ls.q + ls.r * f * f) * pi0 * pi0
    with np.errstate(divide="ignore", invalid="ignore"):
        losses = numerator / denominator
    return np.where(denominator > 0.0, losses, np.inf)


def peg_optimality_check(tr: Transmission, ls: LossSpec) -> bool:
    """Whether the optimal rule is the peg (F* = 0 within tolerance)."""
    try:
        solution = riccati_solve(tr, ls)
    except UnboundedLoss:
        return False
    return abs(solution.f_star) <= PEG_TOLERANCE


# ============================================
# Robust control
# ============================================

def robust_stabilizing_interval(a: float, b_min: float, b_max: float, beta: float = 1.0) -> GainInterval:
    """
    Gains keeping beta*(A + B*F)^2 < 1 for every B in [b_min, b_max] < 0.

    The interval is ((A - 1/sqrt(beta))/|b_max|, (A + 1/sqrt(beta))/|b_min|)
    when A exceeds 1/sqrt(beta); empty when the uncertainty is too wide.
    """
    if not b_min <= b_max < 0.0:
        raise InvalidParameters("robust intervals need b_min <= b_max < 0")
    bound = 1.0 / math.sqrt(beta)
    lower_num = a - bound
    low = lower_num / abs(b_max) if lower_num > 0.0 else lower_num / abs(b_min)
    high = (a + bound) / abs(b_min)
    return GainInterval(low=low, high=high)


def robust_minimax_gain(
    a: float,
    b_min: float,
    b_max: float,
    ls: LossSpec,
    pi0: float,
    f_grid: Optional[np.ndarray] = None,
    b_grid: Optional[np.ndarray] = None,
) -> Tuple[float, float]:
    """
    Gain minimising the worst-case loss over B in [b_min, b_max].

    Args:
        a: Open-loop persistence
        b_min: Most negative instrument effect
        b_max: Least negative instrument effect
        ls: Loss weights and discount
        pi0: Initial deviation
        f_grid: Candidate gains (default 4001 points on [-20, 20])
        b_grid: Instrument effects checked (default 51 points)

    Returns:
        tuple: (robust gain, worst-case loss)

    Raises:
        NoRobustStabilizer: if every candidate is unbounded somewhere
    """
    if not b_min <= b_max < 0.0:
        raise InvalidParameters("robust control needs b_min <= b_max < 0")
    f_grid = np.linspace(-20.0, 20.0, 4001) if f_grid is None else np.asarray(f_grid, dtype=float)
    b_grid = np.linspace(b_min, b_max, 51) if b_grid is None else np.asarray(b_grid, dtype=float)

    worst = policy_loss_grid(a, b_grid, f_grid, ls, pi0).max(axis=1)
    if not np.isfinite(worst).any():
        raise NoRobustStabilizer(f"no gain on the grid stabilizes B in [{b_min}, {b_max}]")

    best = int(np.argmin(worst))
    logger.debug(f"Robust gain {f_grid[best]} with worst-case loss {worst[best]}")
    return float(f_grid[best]), float(worst[best])


# ============================================
# LQG
# ============================================

def lqg_simulate(
    tr: Transmission,
    ls: LossSpec,
    obs_noise_std: float,
    pi0: float,
    horizon: int,
    seed: int = 0,
) -> LQGResult:
    """
    Certainty-equivalent control i[t] = F* * filtered pi[t] on noisy observations.

    The planner observes y[t] = pi[t] + nu[t] and knows pi0. Structural shocks
    are drawn before observation noise, so with ``obs_noise_std`` = 0 the path
    reproduces the full-information proportional rule with the same seed.

    Raises:
        EmptyHorizon: if horizon < 1
    """
    if horizon < 1:
        raise EmptyHorizon()
    if obs_noise_std < 0.0:
        raise InvalidParameters("observation noise must be non-negative")

    f = riccati_solve(tr, ls).f_star
    rng = make_rng(seed)
    n = horizon + 1
    eps = tr.sigma_eps * rng.standard_normal(n)
    nu = obs_noise_std * rng.standard_normal(n)

    pi = np.empty(n)
    i = np.empty(n)
    y = np.empty(n)
    filtered = np.empty(n)
    gains = np.empty(n)

    pi[0] = pi0
    state = KalmanState(estimate=pi0, variance=0.0, gain=0.0)
    for t in range(n):
        y[t] = pi[t] + nu[t]
        if t > 0:
            state = kalman_step(state, tr.a, tr.sigma_eps, obs_noise_std, y[t], drive=tr.b * i[t - 1])
        filtered[t] = state.estimate
        gains[t] = state.gain
        i[t] = f * state.estimate
        if t < horizon:
            pi[t + 1] = tr.a * pi[t] + tr.b * i[t] + eps[t]

    discounts = ls.beta ** np.arange(n)
    realized = float(0.5 * np.sum(discounts * (ls.q * pi ** 2 + ls.r * i ** 2)))
    trajectory = Trajectory(t=np.arange(n), pi=pi, i=i, eps=eps, eta=np.zeros(n))
    logger.debug(f"LQG run of {horizon} periods, obs noise {obs_noise_std}: realized loss {realized}")
    return LQGResult(
        trajectory=trajectory,
        observations=y,
        filtered=filtered,
        filter_gains=gains,
        f_star=f,
        realized_loss=realized,
    )
