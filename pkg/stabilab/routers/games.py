"""
Games Router

Barro-Gordon, misperception iteration and commitment plans.
"""
import pandas as pd

from stabilab.models.scenarios import BarroGordonParams, MisperceptionParams, ScenarioName, StackelbergParams
from stabilab.routers.base import RunContext, ScenarioResult, ScenarioRouter
from stabilab.schemas.control import LossSpec
from stabilab.schemas.games import StackelbergModel
from stabilab.schemas.model import Transmission
from stabilab.services import policy_games


router = ScenarioRouter(tags=["games"])


@router.scenario(ScenarioName.BARRO_GORDON, params=BarroGordonParams)
def barro_gordon(params: BarroGordonParams, context: RunContext) -> ScenarioResult:
    """Discretionary equilibrium with a biased target"""
    ls = LossSpec(q=params.q, r=params.r, beta=params.beta, pi_bias=params.pi_bias)
    equilibrium = policy_games.barro_gordon_equilibrium(params.b, ls)
    return ScenarioResult(
        artifacts={"barro_gordon": pd.DataFrame([equilibrium.model_dump()])},
        summary=equilibrium.model_dump(),
    )


@router.scenario(ScenarioName.MISPERCEPTION, params=MisperceptionParams)
def misperception(params: MisperceptionParams, context: RunContext) -> ScenarioResult:
    """Re-optimization against a misperceived persistence"""
    tr = Transmission(a=params.a, b=params.b)
    ls = LossSpec(q=params.q, r=params.r, beta=params.beta)
    run = policy_games.kp_misperception_iterate(tr, ls, params.n_iter, mode=params.mode, pi0=params.pi0)
    return ScenarioResult(
        artifacts={"misperception": run.to_frame()},
        summary={
            "mode": run.mode,
            "iterations": len(run.f_path),
            "final F": run.f_path[-1],
            "rules loss": run.rules_loss,
            "verdict": run.verdict,
        },
    )


@router.scenario(ScenarioName.STACKELBERG, params=StackelbergParams)
def stackelberg(params: StackelbergParams, context: RunContext) -> ScenarioResult:
    """Commitment plan, best proportional rule and optional re-optimization"""
    model = StackelbergModel(delta=params.delta, kappa=params.kappa, b=params.b, rho=params.rho)
    ls = LossSpec(q=params.q, r=params.r, beta=params.beta)
    plan = policy_games.stackelberg_commit(model, ls, params.z0, params.horizon)
    best_f, best_loss = policy_games.best_rule_loss(model, ls, params.z0, plan.horizon)

    metrics = {
        "horizon": plan.horizon,
        "commitment_loss": plan.loss,
        "gamma_1": float(plan.gamma_path[1]),
        "best_rule_gain": best_f,
        "best_rule_loss": best_loss,
    }
    artifacts = {"stackelberg": plan.to_frame()}
    if params.reoptimize_at is not None:
        new_plan, deviation = policy_games.stackelberg_reoptimize(plan, params.reoptimize_at)
        metrics["reoptimized_at"] = params.reoptimize_at
        metrics["deviation"] = deviation
        metrics["concatenated_loss"] = policy_games.stackelberg_concatenated_loss(plan, new_plan)
        artifacts["stackelberg_reoptimized"] = new_plan.to_frame()

    artifacts["stackelberg_summary"] = pd.DataFrame({"metric": list(metrics), "value": list(metrics.values())})
    return ScenarioResult(artifacts=artifacts, summary=metrics)
