"""
Estimation Router

Identification and price-puzzle experiments, rule fitting and welfare costs.
"""
import pandas as pd

from stabilab.models.scenarios import (
    FitRuleParams,
    IdentifyParams,
    PricePuzzleParams,
    ScenarioName,
    WelfareParams,
)
from stabilab.routers.base import RunContext, ScenarioResult, ScenarioRouter
from stabilab.schemas.estimation import RuleSpec, WelfareSpec
from stabilab.schemas.model import ProportionalRule, Transmission
from stabilab.services import classic_control, estimation, model_core


router = ScenarioRouter(tags=["estimation"])


@router.scenario(ScenarioName.IDENTIFY, params=IdentifyParams)
def identify(params: IdentifyParams, context: RunContext) -> ScenarioResult:
    """Estimate the transmission from data generated under a feedback rule"""
    tr = Transmission(a=params.a, b=params.b, sigma_eps=params.sigma_eps)
    traj = model_core.simulate_trajectory(
        tr, ProportionalRule(f=params.f), params.pi0, params.horizon, sigma_eta=params.sigma_eta, seed=context.seed,
    )
    result = estimation.estimate_transmission(traj, params.method)
    return ScenarioResult(
        artifacts={"identify": result},
        summary={"A hat": result.coef("a"), "B hat": result.coef("b"), "r2": result.r2, "n": result.n},
    )


@router.scenario(ScenarioName.PRICE_PUZZLE, params=PricePuzzleParams)
def price_puzzle(params: PricePuzzleParams, context: RunContext) -> ScenarioResult:
    """Naive against correctly specified estimates of the instrument effect"""
    tr = Transmission(a=params.a, b=params.b, sigma_eps=params.sigma_eps)
    traj = model_core.simulate_trajectory(
        tr, ProportionalRule(f=params.f), params.pi0, params.horizon, sigma_eta=params.sigma_eta, seed=context.seed,
    )
    report = estimation.price_puzzle_demo(traj, tr, params.f, sigma_eta=params.sigma_eta)
    return ScenarioResult(
        artifacts={"price_puzzle": pd.DataFrame([report.model_dump()])},
        summary={
            "naive B": report.naive_b,
            "population slope": report.population_slope,
            "multivariate B": report.multivariate_b,
            "sign flip": report.sign_flip,
            "misadvice": report.misadvice,
        },
    )


@router.scenario(ScenarioName.FIT_RULE, params=FitRuleParams)
def fit_rule(params: FitRuleParams, context: RunContext) -> ScenarioResult:
    """Fit a Taylor or inertial rule to quarterly CSV data"""
    frame = estimation.load_rule_data(context.resolve(params.data))
    result = estimation.fit_policy_rule(frame, params.spec)

    summary = {name: value for name, value in zip(result.names, result.coefficients)}
    summary["r2"] = result.r2
    if params.spec is RuleSpec.TAYLOR:
        _, unexplained = classic_control.taylor_rule_residuals(frame)
        summary["unexplained by 1993 rule"] = unexplained
    else:
        summary["long-run gap sensitivity"] = result.long_run_gap_sensitivity
    return ScenarioResult(artifacts={"fit_rule": result}, summary=summary)


@router.scenario(ScenarioName.WELFARE, params=WelfareParams)
def welfare(params: WelfareParams, context: RunContext) -> ScenarioResult:
    """Welfare cost of consumption fluctuations"""
    cost = estimation.lucas_welfare_cost(WelfareSpec(gamma=params.gamma, sigma_x=params.sigma_x))
    row = {"gamma": params.gamma, "sigma_x": params.sigma_x, "cost": cost}
    if params.compares_rules:
        peg, feedback, ratio = estimation.stabilization_welfare_gain(
            params.gamma, params.sigma_eps, params.a, params.lam,
        )
        row.update({"cost_peg": peg, "cost_feedback": feedback, "cost_ratio": ratio})
    return ScenarioResult(artifacts={"welfare": pd.DataFrame([row])}, summary=dict(row))
