"""
Potential-outcome enumeration models
"""
from enum import Enum
from typing import List, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator


class PotentialOutcomes(BaseModel):
    """
    Every neighbor-activation assignment of one node: the influence it would
    receive and whether it would activate (I >= true_theta).
    """
    model_config = ConfigDict(arbitrary_types_allowed=True)

    weights: np.ndarray
    true_theta: float
    influences: np.ndarray
    outcomes: np.ndarray

    @model_validator(mode="after")
    def _check_size(self) -> "PotentialOutcomes":
        expected = 2 ** self.weights.size
        if self.influences.shape != (expected,) or self.outcomes.shape != (expected,):
            raise ValueError(f"expected {expected} assignments")
        return self

    def __len__(self) -> int:
        return int(self.influences.size)

    def as_pairs(self) -> List[Tuple[float, int]]:
        return [(float(i), int(w)) for i, w in zip(self.influences, self.outcomes)]


class PotentialOutcomeSets(BaseModel):
    """Outcomes above and below one candidate trigger, with true-threshold counts"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    trigger: float
    above: np.ndarray
    below: np.ndarray
    activated: int = Field(ge=0)
    not_activated: int = Field(ge=0)

    @property
    def n_above(self) -> int:
        return int(self.above.size)

    @property
    def n_below(self) -> int:
        return int(self.below.size)


class VerificationStatus(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    INCONCLUSIVE = "inconclusive"


class TheoremCheck(BaseModel):
    """Outcome of checking that the effect-maximizing trigger recovers the threshold"""
    status: VerificationStatus
    argmax: Tuple[float, ...] = ()
    max_effect: float = 0.0
    reason: str = ""


class VerificationSummary(BaseModel):
    trials: int
    passed: int = 0
    failed: int = 0
    inconclusive: int = 0
    failures: List[str] = Field(default_factory=list)

    @property
    def conclusive(self) -> int:
        return self.passed + self.failed
