"""
Attributed network data model
"""
from typing import Iterable, List, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, model_validator

from utils.exceptions import ArgumentError


class Graph(BaseModel):
    """
    Attributed network with dense 0-based node ids.

    `adjacency[v]` holds the in-neighbors of v (nodes u with an edge (u, v)),
    sorted ascending. Undirected graphs store both directions. Influence
    weights are degree-derived: w_uv = 1 / |N(v)|.

    Build instances through NetworkService.from_edge_list, which enforces the
    no-self-loop, no-duplicate and symmetry invariants.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True)

    node_count: int = Field(gt=0)
    adjacency: Tuple[Tuple[int, ...], ...]
    directed: bool = False
    features: np.ndarray

    _in_degree: np.ndarray = PrivateAttr()
    _edge_src: np.ndarray = PrivateAttr()
    _edge_dst: np.ndarray = PrivateAttr()

    @model_validator(mode="after")
    def _check_shapes(self) -> "Graph":
        if len(self.adjacency) != self.node_count:
            raise ValueError(f"adjacency has {len(self.adjacency)} entries for {self.node_count} nodes")
        if self.features.ndim != 2 or self.features.shape[0] != self.node_count:
            raise ValueError(f"feature matrix shape {self.features.shape} does not match {self.node_count} nodes")
        return self

    def model_post_init(self, __context) -> None:
        degrees = np.fromiter((len(a) for a in self.adjacency), dtype=np.int64, count=len(self.adjacency))
        self._in_degree = degrees
        self._edge_dst = np.repeat(np.arange(len(self.adjacency), dtype=np.int64), degrees)
        self._edge_src = np.fromiter(
            (u for a in self.adjacency for u in a), dtype=np.int64, count=int(degrees.sum())
        )

    @property
    def feature_count(self) -> int:
        return int(self.features.shape[1])

    @property
    def in_degree(self) -> np.ndarray:
        return self._in_degree

    @property
    def edge_count(self) -> int:
        """Number of edges (unordered pairs for undirected graphs)"""
        total = int(self._in_degree.sum())
        return total if self.directed else total // 2

    def edge_arrays(self) -> Tuple[np.ndarray, np.ndarray]:
        """(source, target) arrays of every influence edge"""
        return self._edge_src, self._edge_dst

    def check_node(self, v: int) -> int:
        if not 0 <= int(v) < self.node_count:
            raise ArgumentError(f"node id {v} out of range [0, {self.node_count})")
        return int(v)

    def active_mask(self, active: Iterable[int]) -> np.ndarray:
        """Boolean node mask of an active set; every id must lie in [0, node_count)"""
        mask = np.zeros(self.node_count, dtype=bool)
        ids = np.fromiter((int(v) for v in active), dtype=np.int64)
        if ids.size and (ids.min() < 0 or ids.max() >= self.node_count):
            bad = ids[(ids < 0) | (ids >= self.node_count)]
            raise ArgumentError(f"active set names node id {int(bad[0])} outside [0, {self.node_count})")
        mask[ids] = True
        return mask

    def neighbors(self, v: int) -> List[int]:
        """In-neighborhood N(v), ascending ids"""
        return list(self.adjacency[self.check_node(v)])

    def influence_weight(self, u: int, v: int) -> float:
        """w_uv = 1/|N(v)| for u in N(v)"""
        v = self.check_node(v)
        if int(u) not in self.adjacency[v]:
            raise ArgumentError(f"node {u} is not an in-neighbor of {v}")
        return 1.0 / len(self.adjacency[v])
