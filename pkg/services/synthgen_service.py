"""
Synthetic network, attribute, threshold and seed-set generation
"""
from collections import deque
from typing import Dict, FrozenSet, List, Mapping

import networkx as nx
import numpy as np

from services.base_service import BaseService
from services.network_service import NetworkService
from models.network import Graph
from models.diffusion import EPSILON, ThresholdAssignment, ThresholdScheme
from utils.exceptions import ArgumentError, DegenerateInputError

LINEAR_ACTIVE_FEATURES = 10
QUADRANT_FEATURES = (0, 1)

# Parameter sweeps of the synthetic grid
SWEEPS: Dict[str, List[float]] = {
    "erdos_renyi": [round(0.05 * i, 2) for i in range(1, 11)],
    "pref_attach": [1, 2, 5, 10, 20, 30, 40, 50],
    "forest_fire": [round(0.05 * i, 2) for i in range(1, 11)],
    "watts_strogatz": [2, 4, 10, 20, 30, 40, 50],
}
SWEEP_PARAMETER = {"erdos_renyi": "p", "pref_attach": "k", "forest_fire": "fwd", "watts_strogatz": "k"}


class SyntheticDataService(BaseService):
    """Pure generators; every output is a function of its arguments and rng_seed"""

    def __init__(self):
        super().__init__()
        self.network_service = NetworkService()

    def gen_graph(self, model: str, n: int, params: Mapping[str, float], rng_seed: int) -> Graph:
        """
        Generate an undirected synthetic graph

        Args:
            model: erdos_renyi (p), pref_attach (k), forest_fire (fwd, bwd=0.1)
                or watts_strogatz (k, rewire=0.1)
            n: Node count (>= 2)
            params: Model-specific parameters
            rng_seed: Generator seed

        Returns:
            Graph with exactly n nodes and no features
        """
        self.require(int(n) == n and n >= 2, f"n must be an integer >= 2, got {n}")
        n = int(n)
        params = dict(params or {})

        if model == "erdos_renyi":
            p = self._param(params, "p")
            self.require(0.0 < p < 1.0, f"erdos_renyi requires 0 < p < 1, got {p}")
            nx_graph = nx.fast_gnp_random_graph(n, p, seed=rng_seed)
            edges = list(nx_graph.edges())
        elif model == "pref_attach":
            k = self._int_param(params, "k")
            self.require(1 <= k < n, f"pref_attach requires 1 <= k < n, got k={k}")
            edges = list(nx.barabasi_albert_graph(n, k, seed=rng_seed).edges())
        elif model == "watts_strogatz":
            k = self._int_param(params, "k")
            rewire = float(params.get("rewire", 0.1))
            self.require(k >= 2 and k % 2 == 0 and k < n, f"watts_strogatz requires even 2 <= k < n, got k={k}")
            self.require(0.0 <= rewire <= 1.0, f"rewiring probability must lie in [0, 1], got {rewire}")
            edges = list(nx.watts_strogatz_graph(n, k, rewire, seed=rng_seed).edges())
        elif model == "forest_fire":
            fwd = self._param(params, "fwd")
            bwd = float(params.get("bwd", 0.1))
            self.require(0.0 < fwd < 1.0, f"forest_fire requires 0 < fwd < 1, got {fwd}")
            self.require(0.0 <= bwd < 1.0, f"forest_fire requires 0 <= bwd < 1, got {bwd}")
            edges = self._forest_fire(n, fwd, bwd, self.rng(rng_seed))
        else:
            raise ArgumentError(f"unknown graph model: {model}")

        graph = self.network_service.from_edge_list(edges, directed=False, node_count=n)
        self.log_info(f"Generated {model} graph", n=n, edges=graph.edge_count)
        return graph

    def _forest_fire(self, n: int, fwd: float, bwd: float, rng: np.random.Generator) -> List[tuple]:
        """
        Forest fire growth with geometric forward/backward burning.

        Each arriving node picks a uniform ambassador and recursively burns a
        geometric number of its unburned out-links (mean fwd/(1-fwd)) and
        in-links (mean bwd/(1-bwd)); it links to every burned node.
        """
        out_links: List[List[int]] = [[] for _ in range(n)]
        in_links: List[List[int]] = [[] for _ in range(n)]
        edges = []
        for v in range(1, n):
            ambassador = int(rng.integers(v))
            burned = {ambassador}
            queue = deque([ambassador])
            while queue:
                w = queue.popleft()
                forward = int(rng.geometric(1.0 - fwd)) - 1
                backward = int(rng.geometric(1.0 - bwd)) - 1
                for links, count in ((out_links[w], forward), (in_links[w], backward)):
                    candidates = [u for u in links if u not in burned]
                    if count <= 0 or not candidates:
                        continue
                    picked = rng.choice(len(candidates), size=min(count, len(candidates)), replace=False)
                    for i in sorted(picked.tolist()):
                        burned.add(candidates[i])
                        queue.append(candidates[i])
            for u in sorted(burned):
                out_links[v].append(u)
                in_links[u].append(v)
                edges.append((v, u))
        return edges

    def gen_attributes(self, n: int, m: int, rng_seed: int) -> np.ndarray:
        """n x m matrix of i.i.d. N(0, 1) attributes"""
        self.require(n >= 1 and m >= 1, f"n and m must be >= 1, got n={n}, m={m}")
        return self.rng(rng_seed).standard_normal((int(n), int(m)))

    def gen_thresholds(self, scheme: str, features: np.ndarray, rng_seed: int) -> ThresholdAssignment:
        """
        Generate ground-truth thresholds from node attributes

        Args:
            scheme: `linear` (random regression on 10 attributes, min-max
                normalized) or `quadrant` (one U(0,1) value per sign cell of
                attributes 0 and 1)
            features: (n, m) attribute matrix
            rng_seed: Generator seed

        Returns:
            ThresholdAssignment clamped to [1e-6, 1]
        """
        features = np.asarray(features, dtype=float)
        self.require(features.ndim == 2, "features must be an (n, m) matrix")
        n, m = features.shape
        rng = self.rng(rng_seed)

        if scheme == ThresholdScheme.LINEAR.value:
            self.require(m >= LINEAR_ACTIVE_FEATURES, f"linear scheme needs m >= {LINEAR_ACTIVE_FEATURES}, got {m}")
            chosen = rng.choice(m, size=LINEAR_ACTIVE_FEATURES, replace=False)
            coefficients = np.zeros(m)
            coefficients[chosen] = rng.standard_normal(LINEAR_ACTIVE_FEATURES)
            scores = features @ coefficients
            low, high = scores.min(), scores.max()
            if high - low <= 0.0:
                raise DegenerateInputError("linear scores are constant; cannot normalize")
            thresholds = np.clip((scores - low) / (high - low), EPSILON, 1.0)
            return ThresholdAssignment(thresholds=thresholds, scheme=ThresholdScheme.LINEAR,
                                       coefficients=coefficients.tolist())

        if scheme == ThresholdScheme.QUADRANT.value:
            self.require(m >= 2, f"quadrant scheme needs m >= 2, got {m}")
            cell_values = np.clip(rng.uniform(0.0, 1.0, size=4), EPSILON, 1.0)
            first, second = QUADRANT_FEATURES
            cells = 2 * (features[:, first] >= 0).astype(int) + (features[:, second] >= 0).astype(int)
            return ThresholdAssignment(thresholds=cell_values[cells], scheme=ThresholdScheme.QUADRANT,
                                       cell_values=cell_values.tolist())

        raise ArgumentError(f"cannot generate thresholds for scheme: {scheme}")

    def seed_activations(self, n: int, count: int, rng_seed: int) -> FrozenSet[int]:
        """Uniform sample of `count` seed nodes without replacement"""
        self.require(1 <= count <= n, f"seed count must lie in [1, n={n}], got {count}")
        return frozenset(int(v) for v in self.rng(rng_seed).choice(int(n), size=int(count), replace=False))

    @staticmethod
    def sweep_values(model: str) -> List[float]:
        if model not in SWEEPS:
            raise ArgumentError(f"unknown graph model: {model}")
        return list(SWEEPS[model])

    @staticmethod
    def _param(params: Mapping[str, float], name: str) -> float:
        if name not in params:
            raise ArgumentError(f"missing graph parameter: {name}")
        return float(params[name])

    @classmethod
    def _int_param(cls, params: Mapping[str, float], name: str) -> int:
        value = cls._param(params, name)
        if value != int(value):
            raise ArgumentError(f"graph parameter {name} must be an integer, got {value}")
        return int(value)
