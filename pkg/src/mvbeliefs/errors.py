"""Shared exception types.

Every failure carries a stable machine-readable ``code``. Failures that
violate one of the model's standing assumptions (A1 communication network,
A2 beliefs and signal structures, A3 global identifiability) also carry the
violated clause, so callers can surface it without parsing message text.
"""

from __future__ import annotations

__all__ = [
    "ModelError",
    "DimensionMismatch",
    "NotRowStochastic",
    "NotStronglyConnected",
    "NoPositiveDiagonal",
    "InvalidGamma",
    "ConvergenceFailure",
    "InvalidDistribution",
    "UnsupportedObservation",
    "FamilyMismatch",
    "InvalidPrior",
    "InvalidParameter",
    "AmbiguousLimit",
    "TargetOffGrid",
    "OutOfBounds",
    "ConfigError",
]


class ModelError(Exception):
    """Base class for all validation and runtime failures."""

    code: str = "model_error"
    assumption: str | None = None

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message

    def to_dict(self) -> dict:
        payload = {"code": self.code, "message": self.message}
        if self.assumption is not None:
            payload["assumption"] = self.assumption
        return payload


class DimensionMismatch(ModelError):
    code = "dimension_mismatch"


class NotRowStochastic(ModelError):
    """Weight matrix has a negative entry or a row not summing to one."""

    code = "not_row_stochastic"
    assumption = "A1: row-stochastic weight matrix"


class NotStronglyConnected(ModelError):
    """The positivity pattern of the weights is not strongly connected."""

    code = "not_strongly_connected"
    assumption = "A1a: strongly connected communication graph"


class NoPositiveDiagonal(ModelError):
    """No agent assigns positive weight to itself (periodic chain)."""

    code = "no_positive_diagonal"
    assumption = "A1b: at least one positive self-weight"


class InvalidGamma(ModelError):
    """Signal-type weights must lie in (0,1) and sum to one, or be one-hot."""

    code = "invalid_gamma"


class ConvergenceFailure(ModelError):
    """An iterative numerical routine did not reach its tolerance."""

    code = "convergence_failure"

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual

    def to_dict(self) -> dict:
        payload = super().to_dict()
        if self.residual is not None:
            payload["residual"] = self.residual
        return payload


class InvalidDistribution(ModelError):
    """Likelihood family parameters are out of range (e.g. zero mass)."""

    code = "invalid_distribution"
    assumption = "A2b: finite log-likelihoods (positive masses, positive scale)"


class UnsupportedObservation(ModelError):
    code = "unsupported_observation"


class FamilyMismatch(ModelError):
    """Two likelihood families do not share a kind and support."""

    code = "family_mismatch"


class InvalidPrior(ModelError):
    code = "invalid_prior"
    assumption = "A2a: positive initial beliefs on all states"


class InvalidParameter(ModelError):
    code = "invalid_parameter"


class AmbiguousLimit(ModelError):
    """Two or more states tie for the predicted learning outcome."""

    code = "ambiguous_limit"

    def __init__(self, message: str, tied: tuple[int, ...] = ()):
        super().__init__(message)
        self.tied = tuple(tied)

    def to_dict(self) -> dict:
        payload = super().to_dict()
        payload["tied"] = list(self.tied)
        return payload


class TargetOffGrid(ModelError):
    code = "target_off_grid"


class OutOfBounds(ModelError):
    code = "out_of_bounds"


class ConfigError(ModelError):
    code = "invalid_config"
