"""
Linear Threshold Model diffusion engine
"""
from typing import FrozenSet, Iterable, Union

import numpy as np

from services.base_service import BaseService
from services.network_service import NetworkService
from models.network import Graph
from models.diffusion import DiffusionTrace, ThresholdAssignment
from utils.exceptions import ArgumentError

Thresholds = Union[ThresholdAssignment, np.ndarray]


class DiffusionService(BaseService):
    """
    Synchronous LTM updates.

    A node activates at step t+1 when the influence of the nodes active at
    step t reaches its threshold (I >= theta); active nodes stay active.
    """

    def __init__(self):
        super().__init__()
        self.network_service = NetworkService()

    def activation_influence(self, g: Graph, v: int, active: Iterable[int]) -> float:
        """Weighted share of v's in-neighbors that are active; 0 if isolated"""
        neighbors = g.neighbors(v)
        if not neighbors:
            return 0.0
        active = active if isinstance(active, (set, frozenset)) else set(active)
        return sum(1 for u in neighbors if u in active) / len(neighbors)

    def step(self, g: Graph, thresholds: Thresholds, active: Iterable[int]) -> FrozenSet[int]:
        """One synchronous update; all influence reads use the input set"""
        theta = self._threshold_array(g, thresholds)
        mask = g.active_mask(active)
        influence = self.network_service.influence_vector(g, mask)
        newly = ~mask & (influence >= theta)
        if not newly.any():
            return frozenset(int(v) for v in np.flatnonzero(mask))
        return frozenset(int(v) for v in np.flatnonzero(mask | newly))

    def simulate(self, g: Graph, thresholds: Thresholds, seeds: Iterable[int], T: int) -> DiffusionTrace:
        """
        Run the diffusion for T steps from the seed set

        Args:
            g: Graph
            thresholds: ThresholdAssignment or per-node threshold array
            seeds: Initially active nodes (D_0)
            T: Number of steps

        Returns:
            DiffusionTrace D_0..D_T, padded by repetition after a fixed point
        """
        if T < 0:
            raise ArgumentError(f"horizon must be >= 0, got {T}")
        theta = self._threshold_array(g, thresholds)
        mask = g.active_mask(seeds)
        active_sets = [frozenset(int(v) for v in np.flatnonzero(mask))]

        steps_run = 0
        for _ in range(T):
            influence = self.network_service.influence_vector(g, mask)
            newly = ~mask & (influence >= theta)
            if not newly.any():
                break
            mask = mask | newly
            active_sets.append(frozenset(int(v) for v in np.flatnonzero(mask)))
            steps_run += 1
        active_sets.extend([active_sets[-1]] * (T + 1 - len(active_sets)))

        self.log_debug(f"Simulated {steps_run} active step(s); final reach {len(active_sets[-1])}")
        return DiffusionTrace.from_active_sets(active_sets)

    def _threshold_array(self, g: Graph, thresholds: Thresholds) -> np.ndarray:
        theta = thresholds.thresholds if isinstance(thresholds, ThresholdAssignment) else np.asarray(thresholds, dtype=float)
        if theta.shape != (g.node_count,):
            raise ArgumentError(f"expected {g.node_count} thresholds, got shape {theta.shape}")
        return theta
