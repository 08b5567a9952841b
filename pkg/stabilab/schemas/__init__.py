from stabilab.schemas.control import ISPhillips, LossSpec, LQGResult, RiccatiSolution, StaticFriedman, TaylorRule93
from stabilab.schemas.estimation import (
    EstimationMethod,
    KalmanState,
    PricePuzzleReport,
    RegressionResult,
    RuleSpec,
    WelfareSpec,
)
from stabilab.schemas.games import (
    BGEquilibrium,
    MisperceptionMode,
    MisperceptionRun,
    MisperceptionVerdict,
    StackelbergModel,
    StackelbergPlan,
)
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

__all__ = [
    "BGEquilibrium",
    "ClosedLoop",
    "CobwebParams",
    "CobwebRegime",
    "EstimationMethod",
    "FeedbackClass",
    "GainInterval",
    "ISPhillips",
    "InertialRule",
    "KalmanState",
    "LossSpec",
    "LQGResult",
    "MisperceptionMode",
    "MisperceptionRun",
    "MisperceptionVerdict",
    "PIDRule",
    "PegRule",
    "PrivateCase",
    "PricePuzzleReport",
    "PrivateSector",
    "ProportionalRule",
    "RegressionResult",
    "RiccatiSolution",
    "RuleSpec",
    "Rule",
    "StabilityClass",
    "StackelbergModel",
    "StackelbergPlan",
    "StaticFriedman",
    "TaylorRule93",
    "Trajectory",
    "Transmission",
    "WelfareSpec",
]
