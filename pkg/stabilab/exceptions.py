"""
Error taxonomy.

Every error carries a human readable ``detail``. The command line maps
``ConfigError`` to exit code 2. Every ``ComputationError`` and any
``InvalidParameters`` raised by a library call map to exit code 3.
"""
from typing import Optional


class StabilabError(Exception):
    """Base class for all laboratory errors"""

    default_detail = "stabilab error"

    def __init__(self, detail: Optional[str] = None):
        self.detail = detail or self.default_detail
        super().__init__(self.detail)

    @property
    def name(self) -> str:
        return type(self).__name__


class ConfigError(StabilabError):
    default_detail = "Invalid scenario configuration"


class InvalidParameters(StabilabError):
    default_detail = "Parameters violate a model invariant"


# ============================================
# Computation errors
# ============================================

class ComputationError(StabilabError):
    default_detail = "Computation failed"


class EmptyHorizon(ComputationError):
    default_detail = "Horizon must be at least one period"


class NonStationary(ComputationError):
    default_detail = "Process is not stationary (|lambda| >= 1)"


class Uncontrollable(ComputationError):
    default_detail = "Instrument has no effect on the target (B = 0)"


class DegenerateOpenLoop(ComputationError):
    default_detail = "Open-loop standard deviation must be positive"


class NoConvergence(ComputationError):
    default_detail = "Iteration did not converge"


class UnboundedLoss(ComputationError):
    default_detail = "Loss is unbounded for this transmission"


class NoRobustStabilizer(ComputationError):
    default_detail = "No gain stabilizes the whole parameter interval"


class NoStablePlan(ComputationError):
    default_detail = "Forward-looking model admits no stable plan"


class IdentificationFailure(ComputationError):
    default_detail = "Regressors are collinear; parameters are not identified"


class InsufficientData(ComputationError):
    default_detail = "Not enough observations"


class SchemaError(ComputationError):
    default_detail = "Input data is missing required columns"
