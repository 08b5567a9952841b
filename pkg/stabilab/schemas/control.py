"""
Value types for classic and optimal control
"""
from pydantic import BaseModel, ConfigDict, Field, FiniteFloat

from stabilab.schemas.model import FloatArray, Trajectory


class ISPhillips(BaseModel):
    """
    Accelerationist Phillips curve with an IS curve.

    ``a_slope`` = 0 is accepted here and rejected as uncontrollable when the
    transmission is built.
    """
    model_config = ConfigDict(frozen=True)

    a_slope: FiniteFloat = Field(ge=0.0)
    b_is: FiniteFloat = Field(gt=0.0)


class TaylorRule93(BaseModel):
    """i = 1.5*pi + 0.5*x + 1, annual percent"""
    model_config = ConfigDict(frozen=True)

    pi_coef: float = 1.5
    gap_coef: float = 0.5
    intercept: float = 1.0

    def rate(self, pi: float, x: float) -> float:
        return self.pi_coef * pi + self.gap_coef * x + self.intercept


class StaticFriedman(BaseModel):
    model_config = ConfigDict(frozen=True)

    sigma_ol: FiniteFloat = Field(ge=0.0)
    sigma_i: FiniteFloat = Field(ge=0.0)
    rho: FiniteFloat = Field(ge=-1.0, le=1.0)


class LossSpec(BaseModel):
    """Quadratic preferences 1/2 * sum beta^t (q*pi^2 + r*i^2)"""
    model_config = ConfigDict(frozen=True)

    q: FiniteFloat = Field(ge=0.0)
    r: FiniteFloat = Field(gt=0.0)
    beta: FiniteFloat = Field(default=1.0, gt=0.0, le=1.0)
    pi_bias: FiniteFloat = Field(default=0.0, ge=0.0)


class RiccatiSolution(BaseModel):
    model_config = ConfigDict(frozen=True)

    p: float = Field(ge=0.0)
    f_star: float
    lambda_star: float
    iterations: int
    converged: bool
    residual: float
    method: str = "value_iteration"


class LQGResult(BaseModel):
    """Certainty-equivalent control on the filtered state"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    trajectory: Trajectory
    observations: FloatArray
    filtered: FloatArray
    filter_gains: FloatArray
    f_star: float
    realized_loss: float
