"""
Compare Router

Rules against discretion for one transmission and a list of gains.
"""
import math

from stabilab.exceptions import NonStationary
from stabilab.models.scenarios import CompareParams, ComparisonReport, ComparisonRow, ScenarioName
from stabilab.routers.base import RunContext, ScenarioResult, ScenarioRouter
from stabilab.schemas.control import LossSpec
from stabilab.schemas.model import PegRule, ProportionalRule, Transmission
from stabilab.services import model_core, optimal_control


router = ScenarioRouter(tags=["compare"])

PEG_LABEL = "Rule (Peg)"
FEEDBACK_LABEL = "Discretion (Feedback)"


def build_report(tr: Transmission, ls: LossSpec, gains, pi0: float) -> ComparisonReport:
    """One row per gain from classify, policy_loss and ar1_variance"""
    rows = []
    for f in gains:
        rule = PegRule() if f == 0.0 else ProportionalRule(f=f)
        loop = model_core.classify(tr, rule)
        try:
            variance = model_core.ar1_variance(loop.lam, tr.sigma_eps)
        except NonStationary:
            variance = math.inf
        rows.append(ComparisonRow(
            label=PEG_LABEL if f == 0.0 else FEEDBACK_LABEL,
            gain=f,
            lam=loop.lam,
            feedback=loop.feedback_class,
            stability=loop.stability_class,
            loss=optimal_control.policy_loss(tr, ls, f, pi0),
            variance=variance,
        ))
    return ComparisonReport(rows=rows)


@router.scenario(ScenarioName.COMPARE, params=CompareParams)
def compare(params: CompareParams, context: RunContext) -> ScenarioResult:
    """Rules versus discretion report"""
    tr = Transmission(a=params.a, b=params.b, sigma_eps=params.sigma_eps)
    ls = LossSpec(q=params.q, r=params.r, beta=params.beta)
    report = build_report(tr, ls, params.gains, params.pi0)
    summary = {f"{row.label} F={row.gain:g}": f"lambda={row.lam:.4g} {row.stability.value}, loss={row.loss:.4g}"
               for row in report.rows}
    return ScenarioResult(artifacts={"compare": report.to_frame()}, summary=summary)
