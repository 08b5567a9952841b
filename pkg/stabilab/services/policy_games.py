"""
Policy games service

Barro-Gordon discretionary equilibrium, policy iteration under a misperceived
transmission, and commitment against re-optimization in a forward-looking
model.
"""
import math
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from loguru import logger
from scipy import sparse
from scipy.sparse.linalg import spsolve

from stabilab.config import get_settings
from stabilab.exceptions import InvalidParameters, NoConvergence, NoStablePlan, Uncontrollable
from stabilab.schemas.control import LossSpec
from stabilab.schemas.games import (
    BGEquilibrium,
    MisperceptionMode,
    MisperceptionRun,
    MisperceptionVerdict,
    StackelbergModel,
    StackelbergPlan,
)
from stabilab.schemas.model import Transmission
from stabilab.services.optimal_control import policy_loss, solve_lqr

# proportional rules compared against the commitment plan
RULE_GAIN_GRID = np.linspace(-20.0, 20.0, 401)


# ============================================
# Barro-Gordon
# ============================================

def barro_gordon_equilibrium(b: float, ls: LossSpec) -> BGEquilibrium:
    """
    Discretionary equilibrium of a policy maker targeting pi_bias with pi = B*i[-1].

    pi* = beta*Q / (beta*Q + R/B^2) * pi_bias and i* = pi*/B. Both losses are
    per period under the unbiased social loss (beta*Q*pi^2 + R*i^2)/2; the
    rule pi = i = 0 scores zero.

    Raises:
        Uncontrollable: if b = 0
    """
    if b == 0.0:
        raise Uncontrollable()

    weight = ls.beta * ls.q
    pi_star = weight / (weight + ls.r / (b * b)) * ls.pi_bias
    i_star = pi_star / b
    loss_discretion = 0.5 * (weight * pi_star ** 2 + ls.r * i_star ** 2)
    return BGEquilibrium(pi_star=pi_star, i_star=i_star, loss_discretion=loss_discretion, loss_rules=0.0)


# ============================================
# Misperception
# ============================================

def kp_misperception_iterate(
    tr: Transmission,
    ls: LossSpec,
    n_iter: int,
    mode: MisperceptionMode = MisperceptionMode.LAYER,
    pi0: float = 1.0,
) -> MisperceptionRun:
    """
    Re-optimize each period against the persistence measured under the previous rule.

    The planner perceives A_0 = A and then A_k = A + B*F[k-1], the persistence
    the data show once F[k-1] is in force. In ``layer`` mode (the default)
    the LQR gain for the perceived persistence is added on top of F[k-1], so
    the perceived persistence drifts in one direction. In ``replace`` mode
    F[k] is that gain alone; the gains then alternate around a fixed point.
    Losses use the true transmission.

    The run stops early at the first gain with |A + B*F| >= 1/sqrt(beta).

    Raises:
        InvalidParameters: if n_iter < 1
        Uncontrollable: if B = 0
    """
    if n_iter < 1:
        raise InvalidParameters("n_iter must be at least 1")
    if tr.b == 0.0:
        raise Uncontrollable()

    bound = 1.0 / math.sqrt(ls.beta)
    rules_loss = policy_loss(tr, ls, 0.0, pi0)
    gains, perceived, lambdas, losses = [], [], [], []

    f_prev = 0.0
    for k in range(n_iter):
        a_hat = tr.a if k == 0 else tr.a + tr.b * f_prev
        gain = solve_lqr(a_hat, tr.b, ls).f_star
        f = f_prev + gain if mode is MisperceptionMode.LAYER else gain
        lam = tr.a + tr.b * f

        gains.append(f)
        perceived.append(a_hat)
        lambdas.append(lam)
        losses.append(policy_loss(tr, ls, f, pi0))
        f_prev = f
        if abs(lam) >= bound:
            logger.debug(f"Misperception run left the stable region at k={k} (lambda={lam})")
            break

    if any(abs(lam) >= bound for lam in lambdas):
        verdict = MisperceptionVerdict.DIVERGED
    elif any(loss > rules_loss for loss in losses):
        verdict = MisperceptionVerdict.DETERIORATED
    else:
        verdict = MisperceptionVerdict.CONVERGED

    return MisperceptionRun(
        mode=mode,
        f_path=tuple(gains),
        perceived_a_path=tuple(perceived),
        true_lambda_path=tuple(lambdas),
        loss_path=tuple(losses),
        rules_loss=rules_loss,
        verdict=verdict,
    )


def misperception_regime_search(
    transmissions: Sequence[Transmission],
    ratios: Sequence[float],
    n_iter: int = 10,
    modes: Iterable[MisperceptionMode] = tuple(MisperceptionMode),
    beta: float = 1.0,
) -> pd.DataFrame:
    """
    Verdict of the misperception iteration over transmissions, R/Q ratios and modes.

    Returns:
        DataFrame with columns a, b, ratio, mode, verdict, iterations, final_f, max_loss
    """
    modes = list(modes)
    rows = []
    for tr in transmissions:
        for ratio in ratios:
            ls = LossSpec(q=1.0, r=float(ratio), beta=beta)
            for mode in modes:
                run = kp_misperception_iterate(tr, ls, n_iter, mode=mode)
                rows.append({
                    "a": tr.a,
                    "b": tr.b,
                    "ratio": float(ratio),
                    "mode": mode.value,
                    "verdict": run.verdict.value,
                    "iterations": len(run.f_path),
                    "final_f": run.f_path[-1],
                    "max_loss": max(run.loss_path),
                })
    return pd.DataFrame(rows)


# ============================================
# Commitment and re-optimization
# ============================================

def _check_model(model: StackelbergModel) -> None:
    if not 0.0 < model.delta < 1.0:
        raise NoStablePlan(f"discount of the follower must lie in (0, 1), got {model.delta}")
    if not 0.0 <= model.rho < 1.0:
        raise NoStablePlan(f"state persistence must lie in [0, 1), got {model.rho}")
    if model.b == 0.0:
        raise NoStablePlan("instrument has no effect on the follower")
    if model.kappa == 0.0:
        raise InvalidParameters("kappa must be non-zero")


def _discounted_loss(pi: np.ndarray, i: np.ndarray, ls: LossSpec, horizon: int) -> float:
    discounts = ls.beta ** np.arange(horizon)
    return float(0.5 * np.sum(discounts * (ls.q * pi[:horizon] ** 2 + ls.r * i[:horizon] ** 2)))


def _solve_plan(
    model: StackelbergModel,
    ls: LossSpec,
    z0: float,
    horizon: int,
    start: int = 0,
    reoptimized_at: Optional[int] = None,
) -> StackelbergPlan:
    """
    Minimize the loss subject to pi[t] - delta*pi[t+1] - b*i[t] = kappa*z[t], pi[H] = 0.

    The KKT system is solved directly. Variables are pi[0..H] then i[0..H-1];
    the multiplier of condition t, divided by beta^t, is mu[t], and the
    multiplier inherited at t is gamma[t] = (delta/beta)*mu[t-1] with gamma[0] = 0.
    """
    h = horizon
    n_pi, n_var, n_con = h + 1, 2 * h + 1, h + 1
    discounts = ls.beta ** np.arange(h)
    z = z0 * model.rho ** np.arange(h + 1)

    weights = np.zeros(n_var)
    weights[:h] = discounts * ls.q
    weights[n_pi:] = discounts * ls.r

    rows = np.arange(h)
    constraints = sparse.coo_matrix(
        (
            np.concatenate([np.ones(h + 1), np.full(h, -model.delta), np.full(h, -model.b)]),
            (
                np.concatenate([np.arange(h + 1), rows, rows]),
                np.concatenate([np.arange(h + 1), rows + 1, n_pi + rows]),
            ),
        ),
        shape=(n_con, n_var),
    )
    rhs = np.zeros(n_con)
    rhs[:h] = model.kappa * z[:h]

    kkt = sparse.bmat([[sparse.diags(weights), constraints.T], [constraints, None]], format="csc")
    solution = spsolve(kkt, np.concatenate([np.zeros(n_var), rhs]))

    pi = solution[:n_pi]
    i = np.append(solution[n_pi:n_var], 0.0)
    mu = solution[n_var:n_var + h] / discounts
    gamma = np.zeros(h + 1)
    gamma[1:] = (model.delta / ls.beta) * mu

    return StackelbergPlan(
        model=model,
        loss_spec=ls,
        start=start,
        horizon=h,
        t=start + np.arange(h + 1),
        pi_path=pi,
        i_path=i,
        gamma_path=gamma,
        z_path=z,
        loss=_discounted_loss(pi, i, ls, h),
        reoptimized_at=reoptimized_at,
    )


def stackelberg_commit(
    model: StackelbergModel,
    ls: LossSpec,
    z0: float,
    horizon: int,
    extend_horizon: bool = True,
) -> StackelbergPlan:
    """
    Date-0 optimal plan of a leader facing a forward-looking follower.

    Args:
        model: Follower model (delta, kappa, b, rho)
        ls: Leader loss weights and discount
        z0: Initial predetermined state
        horizon: Planning horizon H, at least 2; pi[H] = 0
        extend_horizon: Double H until doubling it once more moves the loss
            by less than ``stackelberg_loss_tol``

    Returns:
        StackelbergPlan with gamma[0] = 0

    Raises:
        NoStablePlan: if the model cannot be stabilized
        NoConvergence: if the loss has not settled by ``stackelberg_max_horizon``
    """
    if horizon < 2:
        raise InvalidParameters("horizon must be at least 2")
    _check_model(model)
    plan = _solve_plan(model, ls, z0, horizon)

    if extend_horizon:
        settings = get_settings()
        while True:
            if 2 * plan.horizon > settings.stackelberg_max_horizon:
                raise NoConvergence(
                    f"commitment loss still moving at horizon {plan.horizon} "
                    f"(limit {settings.stackelberg_max_horizon})"
                )
            longer = _solve_plan(model, ls, z0, 2 * plan.horizon)
            if abs(longer.loss - plan.loss) < settings.stackelberg_loss_tol:
                break
            plan = longer

    logger.debug(f"Commitment plan over {plan.horizon} periods: pi0={plan.pi_path[0]}, loss={plan.loss}")
    return plan


def stackelberg_reoptimize(plan: StackelbergPlan, s: int) -> Tuple[StackelbergPlan, float]:
    """
    Throw the plan away at date s and re-solve from the state reached then.

    The new plan starts with a zero inherited multiplier and ends at the same
    terminal date.

    Returns:
        tuple: (new plan, max |pi_old - pi_new| from s onward)
    """
    if not 0 <= s < plan.horizon:
        raise InvalidParameters(f"re-optimization date must lie in [0, {plan.horizon}), got {s}")

    new_plan = _solve_plan(
        plan.model,
        plan.loss_spec,
        float(plan.z_path[s]),
        plan.horizon - s,
        start=plan.start + s,
        reoptimized_at=plan.start + s,
    )
    deviation = float(np.max(np.abs(plan.pi_path[s:] - new_plan.pi_path)))
    logger.debug(f"Re-optimizing at s={s} (gamma={plan.gamma_path[s]}): deviation {deviation}")
    return new_plan, deviation


def stackelberg_concatenated_loss(plan: StackelbergPlan, reoptimized: StackelbergPlan) -> float:
    """
    Date-0 loss of the path that follows ``plan`` until the switch and ``reoptimized`` after.

    The follower foresees the switch, so inflation before it is recomputed
    backward from the re-optimized plan through the follower's condition.
    """
    s = reoptimized.start - plan.start
    if not 0 <= s < plan.horizon or reoptimized.horizon != plan.horizon - s:
        raise InvalidParameters("re-optimized plan does not continue this plan")

    model = plan.model
    i = np.concatenate([plan.i_path[:s], reoptimized.i_path])
    pi = np.concatenate([np.zeros(s), reoptimized.pi_path])
    for t in range(s - 1, -1, -1):
        pi[t] = model.delta * pi[t + 1] + model.kappa * plan.z_path[t] + model.b * i[t]
    return _discounted_loss(pi, i, plan.loss_spec, plan.horizon)


def stackelberg_rule_loss(
    model: StackelbergModel,
    ls: LossSpec,
    z0: float,
    f: float,
    horizon: int,
) -> float:
    """
    Loss of the time-invariant rule i = F*pi, under which pi[t] = kappa*z[t] / (1 - b*F - delta*rho).

    Infinite when the rule leaves the follower's path indeterminate, that is
    when |1 - b*F| <= delta and pi[t] = delta/(1 - b*F) * pi[t+1] + ... has
    no unique bounded solution.
    """
    _check_model(model)
    if abs(1.0 - model.b * f) <= model.delta:
        return math.inf
    z = z0 * model.rho ** np.arange(horizon)
    pi = model.kappa * z / (1.0 - model.b * f - model.delta * model.rho)
    return _discounted_loss(pi, f * pi, ls, horizon)


def best_rule_loss(
    model: StackelbergModel,
    ls: LossSpec,
    z0: float,
    horizon: int,
    gains: Sequence[float] = RULE_GAIN_GRID,
) -> Tuple[float, float]:
    """Lowest proportional-rule loss on a gain grid, as (gain, loss)."""
    losses = [stackelberg_rule_loss(model, ls, z0, float(f), horizon) for f in gains]
    best = int(np.argmin(losses))
    return float(gains[best]), losses[best]


def commitment_losses(plan: StackelbergPlan, dates: Iterable[int]) -> List[Tuple[int, float, float]]:
    """(date, deviation, concatenated loss) of re-optimizing the plan at each date."""
    rows = []
    for s in dates:
        new_plan, deviation = stackelberg_reoptimize(plan, s)
        rows.append((s, deviation, stackelberg_concatenated_loss(plan, new_plan)))
    return rows
