"""
Diffusion data models: thresholds, traces, snapshots and training tables
"""
from enum import Enum
from typing import Dict, FrozenSet, List, Optional, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from utils.exceptions import ArgumentError

EPSILON = 1e-6


class ThresholdScheme(str, Enum):
    """How a threshold assignment was produced"""
    LINEAR = "linear"
    QUADRANT = "quadrant"
    EXTERNAL = "external"


class ThresholdAssignment(BaseModel):
    """Per-node activation thresholds in [EPSILON, 1]"""
    model_config = ConfigDict(arbitrary_types_allowed=True, use_enum_values=True)

    thresholds: np.ndarray
    scheme: ThresholdScheme
    coefficients: Optional[List[float]] = None
    cell_values: Optional[List[float]] = None

    @field_validator("thresholds", mode="before")
    @classmethod
    def _as_array(cls, value):
        return np.asarray(value, dtype=float)

    @model_validator(mode="after")
    def _check_range(self) -> "ThresholdAssignment":
        values = self.thresholds
        if values.ndim != 1:
            raise ValueError("thresholds must be a vector")
        if values.size and (values.min() < EPSILON or values.max() > 1.0):
            raise ValueError("thresholds must lie in [1e-6, 1]")
        return self

    def __len__(self) -> int:
        return int(self.thresholds.shape[0])


class Snapshot(BaseModel):
    """Structure and activations up to time t"""
    t: int = Field(ge=0)
    active_sets: List[FrozenSet[int]]

    @property
    def active(self) -> FrozenSet[int]:
        return self.active_sets[self.t]


class DiffusionTrace(BaseModel):
    """
    Activated sets D_0..D_T and per-node first activation times.

    Nodes absent from `activation_time` never activate within the horizon.
    """
    horizon: int = Field(ge=0)
    active_sets: List[FrozenSet[int]]
    activation_time: Dict[int, int] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _check_monotone(self) -> "DiffusionTrace":
        if len(self.active_sets) != self.horizon + 1:
            raise ValueError(f"expected {self.horizon + 1} active sets, got {len(self.active_sets)}")
        for t in range(1, len(self.active_sets)):
            if not self.active_sets[t - 1] <= self.active_sets[t]:
                raise ValueError(f"active set shrinks between steps {t - 1} and {t}")
        return self

    @classmethod
    def from_active_sets(cls, active_sets: List[FrozenSet[int]]) -> "DiffusionTrace":
        """Build a trace and derive activation times"""
        activation_time: Dict[int, int] = {}
        for t, active in enumerate(active_sets):
            for v in active:
                activation_time.setdefault(int(v), t)
        return cls(horizon=len(active_sets) - 1, active_sets=list(active_sets),
                   activation_time=activation_time)

    @property
    def seeds(self) -> FrozenSet[int]:
        return self.active_sets[0]

    @property
    def final(self) -> FrozenSet[int]:
        return self.active_sets[-1]

    def time_of(self, v: int) -> Optional[int]:
        return self.activation_time.get(int(v))

    def snapshot(self, t: int) -> Snapshot:
        if not 0 <= t <= self.horizon:
            raise ArgumentError(f"snapshot time {t} outside [0, {self.horizon}]")
        return Snapshot(t=t, active_sets=self.active_sets[: t + 1])

    def window(self, start: int) -> "DiffusionTrace":
        """D_start..D_T re-indexed from 0"""
        if not 0 <= start <= self.horizon:
            raise ArgumentError(f"window start {start} outside [0, {self.horizon}]")
        return DiffusionTrace.from_active_sets(self.active_sets[start:])


class TrainingTable(BaseModel):
    """
    Observation rows (node, step, x, I, z, y) built from a snapshot.

    Rows exist only for nodes inactive at the start of their step, so z is
    always 0 and y marks activation by the end of that step.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True)

    node: np.ndarray
    step: np.ndarray
    x: np.ndarray
    influence: np.ndarray
    z: np.ndarray
    y: np.ndarray

    @model_validator(mode="after")
    def _check_rows(self) -> "TrainingTable":
        n = self.node.shape[0]
        for name in ("step", "influence", "z", "y"):
            if getattr(self, name).shape != (n,):
                raise ValueError(f"column {name} has shape {getattr(self, name).shape}, expected ({n},)")
        if self.x.ndim != 2 or self.x.shape[0] != n:
            raise ValueError(f"feature block has shape {self.x.shape} for {n} rows")
        if n and (self.influence.min() < 0.0 or self.influence.max() > 1.0):
            raise ValueError("influence values must lie in [0, 1]")
        if n and self.z.any():
            raise ValueError("rows must have z = 0")
        return self

    @classmethod
    def empty(cls, feature_count: int) -> "TrainingTable":
        return cls(
            node=np.zeros(0, dtype=np.int64), step=np.zeros(0, dtype=np.int64),
            x=np.zeros((0, feature_count)), influence=np.zeros(0),
            z=np.zeros(0, dtype=np.int8), y=np.zeros(0, dtype=np.int8),
        )

    def __len__(self) -> int:
        return int(self.node.shape[0])

    @property
    def feature_count(self) -> int:
        return int(self.x.shape[1])

    def activated(self) -> np.ndarray:
        """Influence values of rows with y = 1"""
        return self.influence[self.y == 1]

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame({"node": self.node, "step": self.step})
        for j in range(self.feature_count):
            frame[f"x{j}"] = self.x[:, j]
        frame["influence"] = self.influence
        frame["z"] = self.z
        frame["y"] = self.y
        return frame


class ThresholdEstimate(BaseModel):
    """Estimated thresholds for the nodes a caller asked about"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    nodes: Tuple[int, ...]
    values: np.ndarray
    method: str
    fallback_used: bool = False

    @field_validator("values", mode="before")
    @classmethod
    def _as_array(cls, value):
        return np.asarray(value, dtype=float)

    @model_validator(mode="after")
    def _check_alignment(self) -> "ThresholdEstimate":
        if self.values.shape != (len(self.nodes),):
            raise ValueError(f"{len(self.nodes)} nodes but {self.values.shape} values")
        return self

    def spread(self) -> float:
        return float(self.values.max() - self.values.min()) if len(self.nodes) else 0.0
