"""
Experiment configuration and report models
"""
import re
from typing import Any, Dict, List, Literal, Mapping, Optional

import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from config import Config
from utils.exceptions import ConfigError

# Graph parameters used when a run does not name them
DEFAULT_GRAPH_PARAMS: Dict[str, Dict[str, float]] = {
    "erdos_renyi": {"p": 0.1},
    "pref_attach": {"k": 5},
    "forest_fire": {"fwd": 0.3, "bwd": 0.1},
    "watts_strogatz": {"k": 10, "rewire": 0.1},
}
GRAPH_PARAM_FIELDS = ("p", "k", "fwd", "bwd", "rewire")


def _split_list(value: Any) -> Any:
    if isinstance(value, str):
        return [item.strip() for item in value.split(",") if item.strip()]
    return value


class ExperimentConfig(BaseModel):
    """Resolved configuration of one experiment run"""
    model_config = ConfigDict(extra="forbid")

    mode: Literal["synthetic", "ingest"] = "synthetic"

    # Synthetic data
    graph_model: str = "erdos_renyi"
    p: Optional[float] = None
    k: Optional[int] = None
    fwd: Optional[float] = None
    bwd: Optional[float] = None
    rewire: Optional[float] = None
    n_nodes: int = Field(default=Config.N_NODES, ge=2)
    n_features: int = Field(default=Config.N_FEATURES, ge=1)
    threshold_scheme: str = "linear"
    n_seeds: int = Field(default=Config.N_SEEDS, ge=1)
    horizon: int = Field(default=Config.HORIZON, ge=0)
    sweep: bool = False

    # Ingested data
    edges_path: Optional[str] = None
    attributes_path: Optional[str] = None
    activations_path: Optional[str] = None
    thresholds_path: Optional[str] = None
    directed: bool = False

    # Estimation
    snapshots: List[int] = Field(default_factory=list)
    estimators: List[str] = Field(default_factory=lambda: list(Config.ESTIMATORS))
    rows: Literal["per-step", "final"] = "per-step"
    grid: Optional[Literal["observed", "uniform101"]] = None
    ct_min_leaf: int = Field(default=10, ge=1)
    ct_max_depth: int = Field(default=10, ge=0)
    ct_val_fraction: float = Field(default=0.5, ge=0.0, lt=1.0)
    st_min_leaf: int = Field(default=5, ge=1)
    st_max_depth: int = Field(default=12, ge=0)

    # Execution
    reps: int = Field(default=Config.REPETITIONS, ge=1)
    seed: int = Config.DEFAULT_SEED
    workers: int = Field(default=Config.DEFAULT_WORKERS, ge=1)
    out_dir: str = Config.OUTPUT_DIR
    save_data: bool = False

    @field_validator("snapshots", "estimators", mode="before")
    @classmethod
    def _parse_list(cls, value):
        return _split_list(value)

    @field_validator("estimators")
    @classmethod
    def _check_estimators(cls, value: List[str]) -> List[str]:
        unknown = [tag for tag in value if tag not in Config.ESTIMATORS]
        if unknown:
            raise ValueError(f"unknown estimator(s): {', '.join(unknown)}")
        if not value:
            raise ValueError("at least one estimator is required")
        return list(dict.fromkeys(value))

    @field_validator("graph_model")
    @classmethod
    def _check_graph_model(cls, value: str) -> str:
        if value not in Config.GRAPH_MODELS:
            raise ValueError(f"unknown graph model: {value}")
        return value

    @field_validator("threshold_scheme")
    @classmethod
    def _check_scheme(cls, value: str) -> str:
        if value not in ("linear", "quadrant"):
            raise ValueError(f"synthetic thresholds must be linear or quadrant, got {value}")
        return value

    @model_validator(mode="after")
    def _check_mode(self) -> "ExperimentConfig":
        if self.mode == "ingest":
            for name in ("edges_path", "attributes_path", "activations_path"):
                if not getattr(self, name):
                    raise ValueError(f"{name}: required in ingest mode")
        else:
            late = [s for s in self.snapshots if not 0 <= s <= self.horizon]
            if late:
                raise ValueError(f"snapshots: times {late} outside [0, horizon={self.horizon}]")
            if self.n_seeds > self.n_nodes:
                raise ValueError(f"n_seeds: {self.n_seeds} exceeds n_nodes={self.n_nodes}")
        return self

    @classmethod
    def from_mapping(cls, values: Mapping[str, Any]) -> "ExperimentConfig":
        """Validate raw key=value settings; errors name the offending field"""
        cleaned = {key: value for key, value in values.items() if value is not None and value != ""}
        try:
            return cls(**cleaned)
        except ValidationError as e:
            error = e.errors()[0]
            field = ".".join(str(part) for part in error["loc"]) or _field_from_message(error["msg"])
            raise ConfigError(field, error["msg"])

    @property
    def graph_params(self) -> Dict[str, float]:
        params = dict(DEFAULT_GRAPH_PARAMS.get(self.graph_model, {}))
        params.update({name: getattr(self, name) for name in GRAPH_PARAM_FIELDS if getattr(self, name) is not None})
        return params

    @property
    def trigger_grid(self) -> str:
        if self.grid is not None:
            return self.grid
        return "uniform101" if self.mode == "synthetic" else "observed"

    def resolved_snapshots(self, horizon: int) -> List[int]:
        """Requested snapshots, or 1..horizon-1 (just 0 for horizons below 2)"""
        if self.snapshots:
            late = [s for s in self.snapshots if not 0 <= s <= horizon]
            if late:
                raise ConfigError("snapshots", f"snapshot times {late} outside [0, horizon={horizon}]")
            return sorted(set(self.snapshots))
        return list(range(1, horizon)) or [0]

    def echo(self) -> Dict[str, str]:
        """Flat key=value view for run.json"""
        flat = {}
        for key, value in self.model_dump().items():
            if isinstance(value, list):
                value = ",".join(str(v) for v in value)
            flat[key] = "" if value is None else str(value)
        flat["trigger_grid"] = self.trigger_grid
        for name, value in self.graph_params.items():
            flat[f"graph.{name}"] = str(value)
        return flat


def _field_from_message(message: str) -> str:
    """Model-level messages start with `<field>: `"""
    match = re.match(r"(?:Value error, )?(\w+):", message)
    if match and match.group(1) in ExperimentConfig.model_fields:
        return match.group(1)
    return "config"


class MseRow(BaseModel):
    rep: int
    snapshot: int
    method: str
    mse: float
    n_nodes: int
    fallback_used: bool = False


class JaccardRow(BaseModel):
    rep: int
    snapshot: int
    method: str
    jaccard: float
    fallback_used: bool = False


class ReachRow(BaseModel):
    rep: int
    snapshot: int
    t: int
    true_count: int
    pred_count: int
    method: str


class ExperimentReport(BaseModel):
    """Per-repetition metric rows plus the resolved configuration and seeds"""
    config_echo: Dict[str, str] = Field(default_factory=dict)
    seeds: Dict[str, int] = Field(default_factory=dict)
    mse: List[MseRow] = Field(default_factory=list)
    jaccard: List[JaccardRow] = Field(default_factory=list)
    reach: List[ReachRow] = Field(default_factory=list)

    def extend(self, other: "ExperimentReport") -> None:
        self.seeds.update(other.seeds)
        self.mse.extend(other.mse)
        self.jaccard.extend(other.jaccard)
        self.reach.extend(other.reach)

    def mse_frame(self) -> pd.DataFrame:
        return pd.DataFrame([row.model_dump() for row in self.mse], columns=list(MseRow.model_fields))

    def jaccard_frame(self) -> pd.DataFrame:
        return pd.DataFrame([row.model_dump() for row in self.jaccard], columns=list(JaccardRow.model_fields))

    def reach_frame(self) -> pd.DataFrame:
        return pd.DataFrame([row.model_dump() for row in self.reach], columns=list(ReachRow.model_fields))
