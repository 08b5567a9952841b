"""
Value types for estimation
"""
from enum import Enum
from typing import Optional, Tuple

import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, FiniteFloat, model_validator


class RegressionResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    names: Tuple[str, ...]
    coefficients: Tuple[float, ...]
    stderrs: Tuple[float, ...]
    r2: float = Field(ge=0.0, le=1.0)
    n: int
    long_run_gap_sensitivity: Optional[float] = None

    @model_validator(mode="after")
    def _check_shapes(self) -> "RegressionResult":
        k = len(self.names)
        if len(self.coefficients) != k or len(self.stderrs) != k:
            raise ValueError("one coefficient and one stderr per regressor")
        if self.n <= k:
            raise ValueError("need more observations than regressors")
        return self

    def coef(self, name: str) -> float:
        return self.coefficients[self.names.index(name)]

    def stderr(self, name: str) -> float:
        return self.stderrs[self.names.index(name)]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            "name": list(self.names),
            "estimate": list(self.coefficients),
            "stderr": list(self.stderrs),
        })


class KalmanState(BaseModel):
    model_config = ConfigDict(frozen=True)

    estimate: float
    variance: float = Field(ge=0.0)
    gain: float = Field(default=0.0, ge=0.0, le=1.0)


class WelfareSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    gamma: FiniteFloat = Field(gt=0.0)
    sigma_x: FiniteFloat = Field(ge=0.0)


class EstimationMethod(str, Enum):
    OLS = "ols"
    IV = "iv"


class RuleSpec(str, Enum):
    # i ~ pi + x + const
    TAYLOR = "taylor"
    # i ~ i_lag + x, no constant
    INERTIAL = "inertial"


class PricePuzzleReport(BaseModel):
    """
    Univariate slope of pi[t+1] on i[t] against the correctly specified one.

    An adviser who believes the naive slope picks the gain -sign(naive_b)*|F|;
    ``misadvice`` is 0 < A + naive_b*F_adv < A < A + B*F_adv.
    """
    model_config = ConfigDict(frozen=True)

    naive_b: float
    naive_stderr: float
    multivariate_b: float
    true_b: float
    sign_flip: bool
    advised_gain: float
    perceived_lambda: float
    true_lambda: float
    misadvice: bool
    population_slope: Optional[float] = None
