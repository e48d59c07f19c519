"""
Baseline threshold estimators: Random, Heuristic Expected, Heuristic Individual, Linear Regression
"""
from typing import Sequence

import numpy as np

from services.base_service import BaseService
from services.learner_service import LearnerService
from services.network_service import NetworkService
from models.network import Graph
from models.diffusion import DiffusionTrace, ThresholdEstimate, TrainingTable
from utils.exceptions import ArgumentError, EstimatorUnavailableError

FALLBACK_EXPECTED = 0.5


class BaselineService(BaseService):
    """Threshold estimators that do not model heterogeneous peer effects"""

    def __init__(self):
        super().__init__()
        self.learner_service = LearnerService()
        self.network_service = NetworkService()

    def estimate_random(self, nodes: Sequence[int], rng_seed: int) -> ThresholdEstimate:
        """i.i.d. U(0, 1) per node"""
        nodes = tuple(int(v) for v in nodes)
        values = self.rng(rng_seed).uniform(0.0, 1.0, size=len(nodes))
        return ThresholdEstimate(nodes=nodes, values=values, method="random")

    def estimate_heuristic_expected(self, table: TrainingTable, nodes: Sequence[int]) -> ThresholdEstimate:
        """One shared threshold: mean influence at activation (0.5 without activations)"""
        nodes = tuple(int(v) for v in nodes)
        activated = table.activated()
        value = float(activated.mean()) if activated.size else FALLBACK_EXPECTED
        return ThresholdEstimate(nodes=nodes, values=np.full(len(nodes), value), method="heuristic_expected")

    def estimate_heuristic_individual(self, table: TrainingTable, nodes: Sequence[int],
                                      rng_seed: int) -> ThresholdEstimate:
        """Per-node U(min, max) over influence at activation ([0, 1] without activations)"""
        nodes = tuple(int(v) for v in nodes)
        activated = table.activated()
        low, high = (float(activated.min()), float(activated.max())) if activated.size else (0.0, 1.0)
        values = self.rng(rng_seed).uniform(low, high, size=len(nodes))
        return ThresholdEstimate(nodes=nodes, values=np.clip(values, low, high), method="heuristic_individual")

    def linear_regression_labels(self, g: Graph, trace: DiffusionTrace, snapshot_t: int):
        """
        Labels for nodes activated at 1 <= t_v <= snapshot_t with neighbors:
        the influence they received just before activating.
        """
        if not 0 <= snapshot_t <= trace.horizon:
            raise ArgumentError(f"snapshot time {snapshot_t} outside [0, {trace.horizon}]")
        nodes, labels = [], []
        influence_by_step = {}
        for v, t_v in sorted(trace.activation_time.items()):
            if not 1 <= t_v <= snapshot_t or g.in_degree[v] == 0:
                continue
            if t_v not in influence_by_step:
                previous = g.active_mask(trace.active_sets[t_v - 1])
                influence_by_step[t_v] = self.network_service.influence_vector(g, previous)
            nodes.append(v)
            labels.append(influence_by_step[t_v][v])
        return np.asarray(nodes, dtype=np.int64), np.asarray(labels, dtype=float)

    def estimate_linear_regression(self, g: Graph, trace: DiffusionTrace, snapshot_t: int,
                                   nodes: Sequence[int]) -> ThresholdEstimate:
        """
        OLS from features to observed influence-at-activation labels

        Raises:
            EstimatorUnavailableError: no activated non-seed node with neighbors
        """
        nodes = tuple(int(v) for v in nodes)
        labeled, labels = self.linear_regression_labels(g, trace, snapshot_t)
        if labeled.size == 0:
            raise EstimatorUnavailableError("no labeled nodes for linear regression")
        model = self.learner_service.fit_ols(g.features[labeled], labels)
        if not nodes:
            return ThresholdEstimate(nodes=nodes, values=np.zeros(0), method="linear_regression")
        predictions = self.learner_service.predict_many(model, g.features[list(nodes)])
        return ThresholdEstimate(nodes=nodes, values=np.clip(predictions, 0.0, 1.0), method="linear_regression")
