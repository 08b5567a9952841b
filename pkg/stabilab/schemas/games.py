"""
Value types for the policy games
"""
from enum import Enum
from typing import Optional, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, FiniteFloat, model_validator

from stabilab.schemas.control import LossSpec
from stabilab.schemas.model import FloatArray


class BGEquilibrium(BaseModel):
    model_config = ConfigDict(frozen=True)

    pi_star: float
    i_star: float
    loss_discretion: float
    loss_rules: float


class MisperceptionMode(str, Enum):
    # F_k is the LQR gain for the perceived persistence
    REPLACE = "replace"
    # F_k = F_{k-1} + LQR gain for the perceived persistence
    LAYER = "layer"


class MisperceptionVerdict(str, Enum):
    CONVERGED = "Converged"
    DETERIORATED = "Deteriorated"
    DIVERGED = "Diverged"


class MisperceptionRun(BaseModel):
    model_config = ConfigDict(frozen=True)

    mode: MisperceptionMode
    f_path: Tuple[float, ...]
    perceived_a_path: Tuple[float, ...]
    true_lambda_path: Tuple[float, ...]
    loss_path: Tuple[float, ...]
    rules_loss: float
    verdict: MisperceptionVerdict

    @model_validator(mode="after")
    def _check_lengths(self) -> "MisperceptionRun":
        paths = (self.f_path, self.perceived_a_path, self.true_lambda_path, self.loss_path)
        if len({len(p) for p in paths}) != 1:
            raise ValueError("misperception paths must have equal length")
        return self

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            "k": np.arange(len(self.f_path)),
            "f": self.f_path,
            "perceived_a": self.perceived_a_path,
            "true_lambda": self.true_lambda_path,
            "loss": self.loss_path,
        })


class StackelbergModel(BaseModel):
    """
    Forward-looking follower with one predetermined state:

        z[t+1] = rho*z[t]
        pi[t]  = delta*pi[t+1] + kappa*z[t] + b*i[t]
    """
    model_config = ConfigDict(frozen=True)

    delta: FiniteFloat = 0.99
    kappa: FiniteFloat = 1.0
    b: FiniteFloat = -1.0
    rho: FiniteFloat = 0.8


class StackelbergPlan(BaseModel):
    """
    Commitment plan chosen at date ``start`` and solved up to ``start + horizon``.

    ``gamma_path`` holds the commitment multiplier on the follower's
    forward-looking condition inherited from the previous period; it is zero
    at the date the plan is chosen.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    model: StackelbergModel
    loss_spec: LossSpec
    start: int
    horizon: int
    t: FloatArray
    pi_path: FloatArray
    i_path: FloatArray
    gamma_path: FloatArray
    z_path: FloatArray
    loss: float
    reoptimized_at: Optional[int] = None

    @model_validator(mode="after")
    def _check_lengths(self) -> "StackelbergPlan":
        paths = (self.t, self.pi_path, self.i_path, self.gamma_path, self.z_path)
        if len({len(p) for p in paths}) != 1:
            raise ValueError("plan paths must have equal length")
        for p in paths:
            p.setflags(write=False)
        return self

    def to_frame(self) -> pd.DataFrame:
        zeros = np.zeros(len(self.t))
        return pd.DataFrame({
            "t": self.t.astype(int),
            "pi": self.pi_path,
            "i": self.i_path,
            "eps": zeros,
            "eta": zeros,
            "gamma": self.gamma_path,
            "z": self.z_path,
        })
