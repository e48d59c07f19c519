"""
Dataset service: snapshots, training tables and activation-log ingestion
"""
import re
from pathlib import Path
from typing import Dict, Optional

import numpy as np
import pandas as pd

from services.base_service import BaseService
from services.network_service import NetworkService
from models.network import Graph
from models.diffusion import (
    DiffusionTrace, ThresholdAssignment, ThresholdScheme, TrainingTable, EPSILON
)
from utils.exceptions import ArgumentError, FormatError
from utils.file_utils import validate_header

ACTIVATION_HEADER = ["node", "activation_time"]
THRESHOLD_HEADER = ["node", "threshold"]
ROW_MODES = ("per-step", "final")
# ASCII digits only
DIGITS = re.compile(r"[0-9]+")


class DatasetService(BaseService):
    """Service for training-table construction and diffusion file formats"""

    def __init__(self):
        super().__init__()
        self.network_service = NetworkService()

    def build_training_table(
        self,
        g: Graph,
        trace: DiffusionTrace,
        snapshot_t: int,
        rows: str = "per-step",
    ) -> TrainingTable:
        """
        Build observation rows from the snapshot at time snapshot_t

        For every step s in 1..snapshot_t and every node v not in D_{s-1} one
        row is emitted: x = features(v), I = influence of D_{s-1} on v,
        z = 0, y = [v in D_s]. With rows="final" only s = snapshot_t is used.

        Args:
            g: Graph
            trace: Ground-truth (or ingested) diffusion trace
            snapshot_t: Snapshot time
            rows: "per-step" or "final"

        Returns:
            TrainingTable
        """
        if not 0 <= snapshot_t <= trace.horizon:
            raise ArgumentError(f"snapshot time {snapshot_t} outside [0, {trace.horizon}]")
        if rows not in ROW_MODES:
            raise ArgumentError(f"rows must be one of {ROW_MODES}, got {rows}")

        steps = range(1, snapshot_t + 1) if rows == "per-step" else range(max(snapshot_t, 1), snapshot_t + 1)
        blocks = []
        for s in steps:
            previous = g.active_mask(trace.active_sets[s - 1])
            current = g.active_mask(trace.active_sets[s])
            influence = self.network_service.influence_vector(g, previous)
            nodes = np.flatnonzero(~previous)
            blocks.append((nodes, np.full(nodes.size, s, dtype=np.int64), influence[nodes],
                           current[nodes].astype(np.int8)))

        if not blocks or not any(b[0].size for b in blocks):
            return TrainingTable.empty(g.feature_count)

        node = np.concatenate([b[0] for b in blocks])
        table = TrainingTable(
            node=node,
            step=np.concatenate([b[1] for b in blocks]),
            x=g.features[node],
            influence=np.concatenate([b[2] for b in blocks]),
            z=np.zeros(node.size, dtype=np.int8),
            y=np.concatenate([b[3] for b in blocks]),
        )
        self.log_debug(f"Built training table with {len(table)} rows at snapshot {snapshot_t}")
        return table

    def load_activation_log(self, path: Path, node_index: Optional[Dict[str, int]] = None) -> DiffusionTrace:
        """
        Read a `node,activation_time` CSV into a monotone trace

        Args:
            path: CSV path
            node_index: Optional external id -> dense id mapping from load_graph;
                without it node ids must be non-negative integers

        Returns:
            DiffusionTrace with horizon = max activation time (0 if empty)
        """
        path = Path(path)
        frame = NetworkService._read_csv(path)
        validate_header(frame.columns, ACTIVATION_HEADER, path)

        times: Dict[int, int] = {}
        for row, (label, time) in enumerate(frame[ACTIVATION_HEADER].itertuples(index=False, name=None)):
            line = row + 2
            label, time = str(label).strip(), str(time).strip()
            node = self._node_id(label, node_index, line, path)
            if not DIGITS.fullmatch(time):
                raise FormatError(f"activation time must be a non-negative integer, got '{time}'",
                                  line=line, path=str(path))
            if node in times:
                raise FormatError(f"duplicate node {label}", line=line, path=str(path))
            times[node] = int(time)

        horizon = max(times.values()) if times else 0
        active_sets = [frozenset(v for v, t in times.items() if t <= step) for step in range(horizon + 1)]
        trace = DiffusionTrace.from_active_sets(active_sets)
        self.log_info(f"Loaded activation log {path.name}: {len(times)} activations over {horizon} step(s)")
        return trace

    def write_activation_log(self, trace: DiffusionTrace, path: Path) -> None:
        rows = sorted(trace.activation_time.items())
        pd.DataFrame(rows, columns=ACTIVATION_HEADER).to_csv(path, index=False)

    def load_thresholds(self, path: Path, node_count: int,
                        node_index: Optional[Dict[str, int]] = None) -> ThresholdAssignment:
        """Read known thresholds (`node,threshold`); every node must be listed once"""
        path = Path(path)
        frame = NetworkService._read_csv(path)
        validate_header(frame.columns, THRESHOLD_HEADER, path)

        values = np.full(node_count, np.nan)
        for row, (label, value) in enumerate(frame[THRESHOLD_HEADER].itertuples(index=False, name=None)):
            line = row + 2
            node = self._node_id(str(label).strip(), node_index, line, path)
            if node >= node_count:
                raise FormatError(f"node {label} outside the graph", line=line, path=str(path))
            if not np.isnan(values[node]):
                raise FormatError(f"duplicate node {label}", line=line, path=str(path))
            try:
                theta = float(value)
            except ValueError:
                raise FormatError(f"threshold must be numeric, got '{value}'", line=line, path=str(path))
            if not EPSILON <= theta <= 1.0:
                raise FormatError(f"threshold {theta} outside [1e-6, 1]", line=line, path=str(path))
            values[node] = theta
        if np.isnan(values).any():
            raise FormatError(f"{int(np.isnan(values).sum())} node(s) without a threshold", path=str(path))
        return ThresholdAssignment(thresholds=values, scheme=ThresholdScheme.EXTERNAL)

    def write_thresholds(self, thresholds: ThresholdAssignment, path: Path) -> None:
        frame = pd.DataFrame({"node": np.arange(len(thresholds)), "threshold": thresholds.thresholds})
        frame.to_csv(path, index=False, float_format="%.17g")

    @staticmethod
    def _node_id(label: str, node_index: Optional[Dict[str, int]], line: int, path: Path) -> int:
        if node_index is not None:
            if label not in node_index:
                raise FormatError(f"unknown node {label}", line=line, path=str(path))
            return node_index[label]
        if not DIGITS.fullmatch(label):
            raise FormatError(f"node id must be a non-negative integer, got '{label}'", line=line, path=str(path))
        return int(label)
