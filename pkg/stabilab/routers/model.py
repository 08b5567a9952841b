"""
Model Router

Closed-loop classification, seeded simulation of any rule and the cobweb.
"""
import math

import numpy as np
import pandas as pd

from stabilab.models.scenarios import ClassifyParams, CobwebScenarioParams, ScenarioName, SimulateParams
from stabilab.routers.base import RunContext, ScenarioResult, ScenarioRouter
from stabilab.schemas.model import CobwebParams, InertialRule, PegRule, PIDRule, ProportionalRule, Transmission
from stabilab.services import classic_control, model_core


router = ScenarioRouter(tags=["model"])


@router.scenario(ScenarioName.CLASSIFY, params=ClassifyParams)
def classify(params: ClassifyParams, context: RunContext) -> ScenarioResult:
    """Classify the closed loop of a peg or proportional rule"""
    tr = Transmission(a=params.a, b=params.b)
    rule = PegRule() if params.f == 0.0 else ProportionalRule(f=params.f)
    loop = model_core.classify(tr, rule)

    low, high = math.nan, math.nan
    if tr.b != 0.0:
        interval = model_core.negative_feedback_interval(tr)
        if not interval.empty:
            low, high = interval.low, interval.high

    row = {
        "a": tr.a,
        "b": tr.b,
        "f": params.f,
        "lambda": loop.lam,
        "feedback": loop.feedback_class.value,
        "stability": loop.stability_class.value,
        "stabilizing_negative_feedback": loop.stabilizing_negative_feedback,
        "rules_condition": model_core.rules_condition(tr),
        "discretion_condition": model_core.discretion_condition(tr, params.f),
        "nf_low": low,
        "nf_high": high,
    }
    return ScenarioResult(
        artifacts={"classify": pd.DataFrame([row])},
        summary={
            "lambda": loop.lam,
            "feedback": loop.feedback_class,
            "stability": loop.stability_class,
            "stabilizing negative feedback": loop.stabilizing_negative_feedback,
        },
    )


@router.scenario(ScenarioName.SIMULATE, params=SimulateParams)
def simulate(params: SimulateParams, context: RunContext) -> ScenarioResult:
    """Simulate any rule with seeded structural and policy shocks"""
    tr = Transmission(a=params.a, b=params.b, sigma_eps=params.sigma_eps)
    rule = params.rule
    if isinstance(rule, PIDRule):
        traj, radius = classic_control.pid_simulate(
            tr, rule, params.pi0, params.horizon, seed=context.seed, sigma_eta=params.sigma_eta,
        )
    elif isinstance(rule, InertialRule):
        traj, radius = classic_control.inertial_simulate(
            tr, rule, params.pi0, params.horizon, seed=context.seed, sigma_eta=params.sigma_eta,
        )
    else:
        traj = model_core.simulate_trajectory(
            tr, rule, params.pi0, params.horizon, sigma_eta=params.sigma_eta, seed=context.seed,
        )
        radius = classic_control.rule_spectral_radius(tr, rule)
    return ScenarioResult(
        artifacts={"simulate": traj.to_frame()},
        summary={
            "rule": rule.kind,
            "spectral radius": radius,
            "stability": model_core.stability_of(radius),
            "final pi": float(traj.pi[-1]),
            "sample var(pi)": float(np.var(traj.pi)),
        },
    )


@router.scenario(ScenarioName.COBWEB, params=CobwebScenarioParams)
def cobweb(params: CobwebScenarioParams, context: RunContext) -> ScenarioResult:
    """Iterate the cobweb market"""
    cw = CobwebParams(f_demand=params.f_demand, b_supply=params.b_supply, e0=params.e0, p_star=params.p_star)
    excess, price, regime = model_core.cobweb_simulate(cw, params.horizon)
    frame = pd.DataFrame({"t": np.arange(params.horizon + 1), "excess": excess, "price": price})
    return ScenarioResult(
        artifacts={"cobweb": frame},
        summary={"B*F": cw.b_supply * cw.f_demand, "regime": regime},
    )
