"""
Control Router

Optimal gains, robust gains and control on a filtered state.
"""
import numpy as np
import pandas as pd

from stabilab.models.scenarios import LQGParams, LQRParams, RobustParams, ScenarioName
from stabilab.routers.base import RunContext, ScenarioResult, ScenarioRouter
from stabilab.schemas.control import LossSpec
from stabilab.schemas.model import Transmission
from stabilab.services import estimation, optimal_control


router = ScenarioRouter(tags=["control"])


@router.scenario(ScenarioName.LQR, params=LQRParams)
def lqr(params: LQRParams, context: RunContext) -> ScenarioResult:
    """Solve the discounted regulator and optionally the persistence curve"""
    tr = Transmission(a=params.a, b=params.b)
    ls = LossSpec(q=params.q, r=params.r, beta=params.beta)
    solution = optimal_control.riccati_solve(tr, ls)
    loss = optimal_control.policy_loss(tr, ls, solution.f_star, params.pi0)
    peg_optimal = optimal_control.peg_optimality_check(tr, ls)

    row = solution.model_dump()
    row.update({"loss": loss, "peg_optimal": peg_optimal})
    artifacts = {"lqr": pd.DataFrame([row])}
    if params.ratio_grid:
        curve = optimal_control.optimal_persistence_curve(tr, params.beta, params.ratio_grid)
        artifacts["lqr_summary"] = pd.DataFrame({"ratio": params.ratio_grid, "lambda_star": curve})

    return ScenarioResult(
        artifacts=artifacts,
        summary={
            "p": solution.p,
            "F*": solution.f_star,
            "lambda*": solution.lambda_star,
            "loss": loss,
            "peg optimal": peg_optimal,
        },
    )


@router.scenario(ScenarioName.ROBUST, params=RobustParams)
def robust(params: RobustParams, context: RunContext) -> ScenarioResult:
    """Minimax gain over an interval of instrument effects"""
    ls = LossSpec(q=params.q, r=params.r, beta=params.beta)
    f_grid = np.linspace(params.f_min, params.f_max, params.f_points)
    b_grid = np.linspace(params.b_min, params.b_max, params.b_points)
    interval = optimal_control.robust_stabilizing_interval(params.a, params.b_min, params.b_max, params.beta)
    f_robust, worst = optimal_control.robust_minimax_gain(
        params.a, params.b_min, params.b_max, ls, params.pi0, f_grid=f_grid, b_grid=b_grid,
    )
    nominal = Transmission(a=params.a, b=0.5 * (params.b_min + params.b_max))
    f_nominal = optimal_control.riccati_solve(nominal, ls).f_star

    row = {
        "f_robust": f_robust,
        "worst_loss": worst,
        "f_nominal": f_nominal,
        "interval_low": interval.low,
        "interval_high": interval.high,
    }
    return ScenarioResult(
        artifacts={"robust": pd.DataFrame([row])},
        summary={"robust F": f_robust, "worst-case loss": worst, "F* at mid B": f_nominal},
    )


@router.scenario(ScenarioName.LQG, params=LQGParams)
def lqg(params: LQGParams, context: RunContext) -> ScenarioResult:
    """Certainty-equivalent control on noisy observations"""
    tr = Transmission(a=params.a, b=params.b, sigma_eps=params.sigma_eps)
    ls = LossSpec(q=params.q, r=params.r, beta=params.beta)
    result = optimal_control.lqg_simulate(tr, ls, params.obs_noise_std, params.pi0, params.horizon, seed=context.seed)
    _, _, steady_gain = estimation.kalman_steady_state(tr.a, tr.sigma_eps, params.obs_noise_std)

    frame = result.trajectory.to_frame()
    frame["y"] = result.observations
    frame["filtered"] = result.filtered
    frame["gain"] = result.filter_gains
    return ScenarioResult(
        artifacts={"lqg": frame},
        summary={
            "F*": result.f_star,
            "realized loss": result.realized_loss,
            "final filter gain": float(result.filter_gains[-1]),
            "steady-state gain": steady_gain,
        },
    )
