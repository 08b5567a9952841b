"""
Scenario request models

One parameter model per scenario; unknown keys are rejected so a typo in a
config shows up as a diagnostic instead of a silently ignored value.
"""
from enum import Enum
from typing import Any, Dict, List, Optional

import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, FiniteFloat, model_validator

from stabilab.config import get_settings
from stabilab.schemas.estimation import EstimationMethod, RuleSpec
from stabilab.schemas.games import MisperceptionMode
from stabilab.schemas.model import FeedbackClass, Rule, StabilityClass

settings = get_settings()


class ScenarioName(str, Enum):
    CLASSIFY = "classify"
    SIMULATE = "simulate"
    COBWEB = "cobweb"
    LQR = "lqr"
    ROBUST = "robust"
    LQG = "lqg"
    BARRO_GORDON = "barro_gordon"
    MISPERCEPTION = "misperception"
    STACKELBERG = "stackelberg"
    IDENTIFY = "identify"
    PRICE_PUZZLE = "price_puzzle"
    FIT_RULE = "fit_rule"
    WELFARE = "welfare"
    COMPARE = "compare"


class ScenarioConfig(BaseModel):
    """A scenario config file after YAML/JSON parsing"""
    model_config = ConfigDict(extra="forbid")

    scenario: ScenarioName
    parameters: Dict[str, Any] = Field(default_factory=dict)
    seed: Optional[int] = None
    output_path: Optional[str] = None


class ScenarioParams(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    def input_files(self) -> Dict[str, str]:
        """Files the scenario reads, keyed by parameter name"""
        return {}


class LossParams(ScenarioParams):
    q: FiniteFloat = Field(ge=0.0)
    r: FiniteFloat = Field(gt=0.0)
    beta: FiniteFloat = Field(default=1.0, gt=0.0, le=1.0)


# ============================================
# model_core / classic_control
# ============================================

class ClassifyParams(ScenarioParams):
    a: FiniteFloat = Field(ge=0.0)
    b: FiniteFloat
    f: FiniteFloat = 0.0


class SimulateParams(ScenarioParams):
    a: FiniteFloat = Field(ge=0.0)
    b: FiniteFloat
    rule: Rule
    sigma_eps: FiniteFloat = Field(default=0.0, ge=0.0)
    sigma_eta: FiniteFloat = Field(default=0.0, ge=0.0)
    pi0: FiniteFloat = 1.0
    horizon: int = Field(default=40, ge=1)


class CobwebScenarioParams(ScenarioParams):
    f_demand: FiniteFloat = Field(lt=0.0)
    b_supply: FiniteFloat = Field(gt=0.0)
    e0: FiniteFloat = 1.0
    p_star: FiniteFloat = 0.0
    horizon: int = Field(default=20, ge=1)


# ============================================
# optimal_control
# ============================================

class LQRParams(LossParams):
    a: FiniteFloat = Field(ge=0.0)
    b: FiniteFloat
    pi0: FiniteFloat = 1.0
    ratio_grid: Optional[List[FiniteFloat]] = None


class RobustParams(LossParams):
    a: FiniteFloat = Field(ge=0.0)
    b_min: FiniteFloat = Field(lt=0.0)
    b_max: FiniteFloat = Field(lt=0.0)
    pi0: FiniteFloat = 1.0
    f_min: FiniteFloat = -20.0
    f_max: FiniteFloat = 20.0
    f_points: int = Field(default=4001, ge=2)
    b_points: int = Field(default=51, ge=1)

    @model_validator(mode="after")
    def _check_ranges(self) -> "RobustParams":
        if self.b_min > self.b_max:
            raise ValueError("b_min must not exceed b_max")
        if self.f_min >= self.f_max:
            raise ValueError("f_min must be below f_max")
        return self


class LQGParams(LossParams):
    a: FiniteFloat = Field(ge=0.0)
    b: FiniteFloat
    sigma_eps: FiniteFloat = Field(default=1.0, ge=0.0)
    obs_noise_std: FiniteFloat = Field(ge=0.0)
    pi0: FiniteFloat = 1.0
    horizon: int = Field(default=200, ge=1)


# ============================================
# policy_games
# ============================================

class BarroGordonParams(LossParams):
    b: FiniteFloat
    pi_bias: FiniteFloat = Field(ge=0.0)


class MisperceptionParams(LossParams):
    a: FiniteFloat = Field(ge=0.0)
    b: FiniteFloat
    n_iter: int = Field(default=10, ge=1)
    mode: MisperceptionMode = MisperceptionMode.LAYER
    pi0: FiniteFloat = 1.0


class StackelbergParams(LossParams):
    beta: FiniteFloat = Field(default=0.99, gt=0.0, le=1.0)
    delta: FiniteFloat = settings.stackelberg_delta
    kappa: FiniteFloat = settings.stackelberg_kappa
    b: FiniteFloat = settings.stackelberg_b
    rho: FiniteFloat = settings.stackelberg_rho
    z0: FiniteFloat = 1.0
    horizon: int = Field(default=settings.stackelberg_horizon, ge=2)
    reoptimize_at: Optional[int] = Field(default=None, ge=0)

    @model_validator(mode="after")
    def _check_reoptimization_date(self) -> "StackelbergParams":
        if self.reoptimize_at is not None and self.reoptimize_at >= self.horizon:
            raise ValueError(f"reoptimize_at must be below the horizon ({self.horizon}), got {self.reoptimize_at}")
        return self


# ============================================
# estimation
# ============================================

class IdentifyParams(ScenarioParams):
    a: FiniteFloat = Field(ge=0.0)
    b: FiniteFloat
    f: FiniteFloat
    sigma_eps: FiniteFloat = Field(default=1.0, ge=0.0)
    sigma_eta: FiniteFloat = Field(default=1.0, ge=0.0)
    pi0: FiniteFloat = 0.0
    horizon: int = Field(default=10_000, ge=3)
    method: EstimationMethod = EstimationMethod.OLS


class PricePuzzleParams(ScenarioParams):
    a: FiniteFloat = Field(ge=0.0)
    b: FiniteFloat
    f: FiniteFloat
    sigma_eps: FiniteFloat = Field(default=1.0, ge=0.0)
    sigma_eta: FiniteFloat = Field(default=0.1, ge=0.0)
    pi0: FiniteFloat = 0.0
    horizon: int = Field(default=10_000, ge=3)


class FitRuleParams(ScenarioParams):
    data: str
    spec: RuleSpec = RuleSpec.TAYLOR

    def input_files(self) -> Dict[str, str]:
        return {"data": self.data}


class WelfareParams(ScenarioParams):
    gamma: FiniteFloat = Field(gt=0.0)
    sigma_x: FiniteFloat = Field(ge=0.0)
    # optional peg-versus-feedback comparison
    a: Optional[FiniteFloat] = None
    lam: Optional[FiniteFloat] = None
    sigma_eps: Optional[FiniteFloat] = Field(default=None, ge=0.0)

    @model_validator(mode="after")
    def _check_comparison(self) -> "WelfareParams":
        given = [name for name in ("a", "lam", "sigma_eps") if getattr(self, name) is not None]
        if given and len(given) < 3:
            missing = sorted({"a", "lam", "sigma_eps"} - set(given))
            raise ValueError(f"peg-versus-feedback comparison needs a, lam and sigma_eps; missing {missing}")
        return self

    @property
    def compares_rules(self) -> bool:
        return self.a is not None


class CompareParams(LossParams):
    a: FiniteFloat = Field(ge=0.0)
    b: FiniteFloat
    gains: List[FiniteFloat] = Field(min_length=1)
    sigma_eps: FiniteFloat = Field(default=1.0, ge=0.0)
    pi0: FiniteFloat = 1.0


# ============================================
# Comparison report
# ============================================

class ComparisonRow(BaseModel):
    model_config = ConfigDict(frozen=True, populate_by_name=True)

    label: str
    gain: float
    lam: float = Field(alias="lambda")
    feedback: FeedbackClass
    stability: StabilityClass
    loss: float
    variance: float


class ComparisonReport(BaseModel):
    """Rules against discretion, one row per policy"""
    model_config = ConfigDict(frozen=True)

    rows: List[ComparisonRow]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([
            {
                "label": row.label,
                "f": row.gain,
                "lambda": row.lam,
                "feedback": row.feedback.value,
                "stability": row.stability.value,
                "loss": row.loss,
                "variance": row.variance,
            }
            for row in self.rows
        ])
