"""
Value types of the first-order single-input single-output model.

All types are frozen pydantic models; array-valued types lock their buffers
so a trajectory can be shared between threads without copies.
"""
from enum import Enum
from typing import Annotated, Literal, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, FiniteFloat, field_validator, model_validator


def _as_float_array(value) -> np.ndarray:
    return np.array(value, dtype=float)


FloatArray = Annotated[np.ndarray, BeforeValidator(_as_float_array)]


class Transmission(BaseModel):
    """Open-loop law of motion pi[t+1] = a*pi[t] + b*i[t] + eps[t]"""
    model_config = ConfigDict(frozen=True)

    a: FiniteFloat = Field(ge=0.0)
    b: FiniteFloat
    sigma_eps: FiniteFloat = Field(default=0.0, ge=0.0)


class PrivateSector(BaseModel):
    """Private sector feedback x = F'*pi composed into the open loop"""
    model_config = ConfigDict(frozen=True)

    a_prime: FiniteFloat = Field(ge=0.0)
    b_prime: FiniteFloat
    f_prime: FiniteFloat

    @field_validator("b_prime")
    @classmethod
    def _b_prime_nonzero(cls, value: float) -> float:
        if value == 0.0:
            raise ValueError("b_prime must be non-zero")
        return value


# ============================================
# Policy rules
# ============================================

class PegRule(BaseModel):
    """Instrument pegged at its steady state, i = 0"""
    model_config = ConfigDict(frozen=True)

    kind: Literal["peg"] = "peg"

    @property
    def gain(self) -> float:
        return 0.0


class ProportionalRule(BaseModel):
    """i[t] = f*pi[t]"""
    model_config = ConfigDict(frozen=True)

    kind: Literal["proportional"] = "proportional"
    f: FiniteFloat

    @property
    def gain(self) -> float:
        return self.f


class PIDRule(BaseModel):
    """
    i[t] = fp*pi[t] + fi*sum(pi[s], s <= t) + fd*(pi[t] - pi[t-1])

    The derivative term starts from pi[-1] = pi[0].
    """
    model_config = ConfigDict(frozen=True)

    kind: Literal["pid"] = "pid"
    fp: FiniteFloat
    fi: FiniteFloat = 0.0
    fd: FiniteFloat = 0.0


class InertialRule(BaseModel):
    """i[t] = rho_i*i[t-1] + f_x*pi[t], with i[-1] = 0"""
    model_config = ConfigDict(frozen=True)

    kind: Literal["inertial"] = "inertial"
    rho_i: FiniteFloat
    f_x: FiniteFloat


Rule = Annotated[
    Union[PegRule, ProportionalRule, PIDRule, InertialRule],
    Field(discriminator="kind"),
]


# ============================================
# Classification
# ============================================

class FeedbackClass(str, Enum):
    NEGATIVE = "NegativeFeedback"
    POSITIVE = "PositiveFeedback"
    NONE = "NoFeedback"
    # B*F < 0 pushing lambda below zero; outside both definitions
    OVERSHOOTING = "Overshooting"


class StabilityClass(str, Enum):
    ZERO_PERSISTENCE = "ZeroPersistence"
    STATIONARY = "Stationary"
    UNIT_ROOT = "UnitRoot"
    EXPLOSIVE = "Explosive"


class PrivateCase(str, Enum):
    ZERO_PERSISTENCE = "ZeroPersistence"
    STATIONARY_PERSISTENCE = "StationaryPersistence"
    NON_STATIONARY = "NonStationary"
    OVERSHOOTING = "Overshooting"


class ClosedLoop(BaseModel):
    model_config = ConfigDict(frozen=True, populate_by_name=True)

    lam: float = Field(alias="lambda")
    feedback_class: FeedbackClass
    stability_class: StabilityClass
    stabilizing_negative_feedback: bool

    @property
    def is_stationary(self) -> bool:
        return self.stability_class in (StabilityClass.ZERO_PERSISTENCE, StabilityClass.STATIONARY)


class CobwebRegime(str, Enum):
    ONE_STEP = "OneStepAdjustment"
    DAMPED = "DampedOscillation"
    PERPETUAL = "PerpetualCycle"
    DIVERGENT = "Divergent"


class CobwebParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    f_demand: FiniteFloat = Field(lt=0.0)
    b_supply: FiniteFloat = Field(gt=0.0)
    e0: FiniteFloat = 1.0
    p_star: FiniteFloat = 0.0


# ============================================
# Trajectories
# ============================================

class Trajectory(BaseModel):
    """
    Time series of target, instrument and shocks, one entry per period.

    Every series has the same length; period 0 comes first.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    t: FloatArray
    pi: FloatArray
    i: FloatArray
    eps: FloatArray
    eta: FloatArray

    @model_validator(mode="after")
    def _check_lengths(self) -> "Trajectory":
        series = (self.t, self.pi, self.i, self.eps, self.eta)
        if len({len(s) for s in series}) != 1:
            raise ValueError("trajectory series must have equal length")
        for s in series:
            s.setflags(write=False)
        return self

    @property
    def horizon(self) -> int:
        return len(self.t) - 1

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            "t": self.t.astype(int),
            "pi": self.pi,
            "i": self.i,
            "eps": self.eps,
            "eta": self.eta,
        })


class GainInterval(BaseModel):
    """Interval of feedback gains; ``empty`` when no gain qualifies"""
    model_config = ConfigDict(frozen=True)

    low: float
    high: float
    low_closed: bool = False
    high_closed: bool = False

    @property
    def empty(self) -> bool:
        if self.low < self.high:
            return False
        return not (self.low == self.high and self.low_closed and self.high_closed)

    def contains(self, f: float) -> bool:
        above = f >= self.low if self.low_closed else f > self.low
        below = f <= self.high if self.high_closed else f < self.high
        return above and below
