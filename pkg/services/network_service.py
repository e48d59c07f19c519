"""
Network service: graph construction, neighbor lookup, influence weights and CSV I/O
"""
import re
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np
import pandas as pd

from services.base_service import BaseService
from models.network import Graph
from utils.exceptions import ArgumentError, FormatError
from utils.file_utils import validate_header, validate_prefixed_header

EDGE_HEADER = ["src", "dst"]
INTEGER_LABEL = re.compile(r"-?[0-9]+")


class NetworkService(BaseService):
    """Service for attributed graph construction and (de)serialization"""

    def from_edge_list(
        self,
        edges: Iterable[Tuple[int, int]],
        directed: bool = False,
        features: Optional[np.ndarray] = None,
        node_count: Optional[int] = None,
    ) -> Graph:
        """
        Build a Graph from (src, dst) pairs

        Args:
            edges: Edge pairs; duplicates are collapsed, self-loops dropped
            directed: If False, every edge is stored in both directions
            features: Optional (n, m) attribute matrix
            node_count: Explicit node count (isolated trailing nodes); when
                omitted it is max id + 1 and must match the feature rows

        Returns:
            Graph with in-neighbor adjacency
        """
        pairs = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
        if pairs.size and pairs.min() < 0:
            raise ArgumentError("node ids must be non-negative")
        max_id = int(pairs.max()) if pairs.size else -1

        if features is not None:
            features = np.asarray(features, dtype=float)
            if features.ndim != 2:
                raise FormatError(f"attribute matrix must be 2-D, got shape {features.shape}")
            expected = node_count if node_count is not None else max_id + 1
            if features.shape[0] != expected:
                raise FormatError(
                    f"attribute matrix has {features.shape[0]} rows, expected {expected}"
                )
        if node_count is None:
            node_count = max_id + 1 if features is None else features.shape[0]
        if node_count < 1:
            raise ArgumentError("graph must have at least one node")
        if max_id >= node_count:
            raise FormatError(f"edge references node {max_id} but graph has {node_count} nodes")
        if features is None:
            features = np.zeros((node_count, 0))

        loops = pairs[:, 0] == pairs[:, 1]
        if loops.any():
            self.log_warning(f"Dropping {int(loops.sum())} self-loop(s)")
            pairs = pairs[~loops]
        if not directed:
            pairs = np.vstack([pairs, pairs[:, ::-1]])

        # one in-neighbor list per node, ascending and deduplicated
        codes = np.unique(pairs[:, 1] * node_count + pairs[:, 0]) if pairs.size else np.zeros(0, dtype=np.int64)
        dst, src = np.divmod(codes, node_count)
        bounds = np.searchsorted(dst, np.arange(node_count + 1))
        adjacency = tuple(
            tuple(int(u) for u in src[bounds[v]:bounds[v + 1]]) for v in range(node_count)
        )

        graph = Graph(node_count=node_count, adjacency=adjacency, directed=directed, features=features)
        self.log_debug(f"Built graph with {node_count} nodes and {graph.edge_count} edges")
        return graph

    def with_features(self, g: Graph, features: np.ndarray) -> Graph:
        """Same structure with a new (n, m) attribute matrix"""
        features = np.asarray(features, dtype=float)
        if features.ndim != 2 or features.shape[0] != g.node_count:
            raise FormatError(f"attribute matrix shape {features.shape} does not match {g.node_count} nodes")
        return Graph(node_count=g.node_count, adjacency=g.adjacency, directed=g.directed, features=features)

    def to_edge_list(self, g: Graph) -> List[Tuple[int, int]]:
        """Edge pairs; undirected edges once as (min, max)"""
        src, dst = g.edge_arrays()
        if g.directed:
            pairs = zip(src.tolist(), dst.tolist())
        else:
            keep = src < dst
            pairs = zip(src[keep].tolist(), dst[keep].tolist())
        return sorted(pairs)

    def neighbors(self, g: Graph, v: int) -> List[int]:
        return g.neighbors(v)

    def influence_weight(self, g: Graph, u: int, v: int) -> float:
        return g.influence_weight(u, v)

    def influence_vector(self, g: Graph, active_mask: np.ndarray) -> np.ndarray:
        """
        Activation influence of every node given a boolean active mask.

        I_v = (# active in-neighbors) / |N(v)|, 0 for isolated nodes.
        """
        active_mask = np.asarray(active_mask, dtype=bool)
        if active_mask.shape != (g.node_count,):
            raise ArgumentError(f"active mask must have shape ({g.node_count},)")
        src, dst = g.edge_arrays()
        counts = np.bincount(dst[active_mask[src]], minlength=g.node_count)
        degree = g.in_degree
        influence = np.zeros(g.node_count)
        nonzero = degree > 0
        influence[nonzero] = counts[nonzero] / degree[nonzero]
        return influence

    def load_graph(
        self,
        edges_path: Path,
        attributes_path: Optional[Path] = None,
        directed: bool = False,
    ) -> Tuple[Graph, Dict[str, int]]:
        """
        Load edge-list and attribute CSVs

        Args:
            edges_path: CSV with header `src,dst`
            attributes_path: Optional CSV with header `node,f0,...,f{m-1}`;
                when present its node column defines the node universe
            directed: Edge semantics

        Returns:
            Tuple of (graph, external id -> dense id mapping)
        """
        edges_path = Path(edges_path)
        edge_frame = self._read_csv(edges_path)
        validate_header(edge_frame.columns, EDGE_HEADER, edges_path)

        features = None
        if attributes_path is not None:
            attributes_path = Path(attributes_path)
            attr_frame = self._read_csv(attributes_path)
            m = validate_prefixed_header(attr_frame.columns, "node", "f", attributes_path)
            labels = [str(x).strip() for x in attr_frame["node"].tolist()]
            duplicates = pd.Series(labels).duplicated()
            if duplicates.any():
                row = int(np.argmax(duplicates.to_numpy()))
                raise FormatError(f"duplicate node {labels[row]}", line=row + 2, path=str(attributes_path))
            node_index = {label: i for i, label in enumerate(labels)}
            values = attr_frame[[f"f{j}" for j in range(m)]].apply(pd.to_numeric, errors="coerce")
            bad = values.isna().any(axis=1).to_numpy()
            if bad.any():
                row = int(np.argmax(bad))
                raise FormatError("non-numeric attribute value", line=row + 2, path=str(attributes_path))
            features = values.to_numpy(dtype=float).reshape(len(labels), m)
        else:
            node_index = {}
            for label in edge_frame[["src", "dst"]].to_numpy().ravel().tolist():
                node_index.setdefault(str(label).strip(), len(node_index))
            node_index = {label: i for i, label in enumerate(sorted(node_index, key=_natural_key))}

        pairs = []
        for row, (src, dst) in enumerate(edge_frame[["src", "dst"]].itertuples(index=False, name=None)):
            src, dst = str(src).strip(), str(dst).strip()
            if src not in node_index or dst not in node_index:
                raise FormatError(f"edge names unknown node ({src}, {dst})", line=row + 2, path=str(edges_path))
            pairs.append((node_index[src], node_index[dst]))

        if not node_index:
            raise FormatError("graph has no nodes", path=str(edges_path))
        graph = self.from_edge_list(pairs, directed=directed, features=features, node_count=len(node_index))
        self.log_info(f"Loaded graph from {edges_path.name}: {graph.node_count} nodes, {graph.edge_count} edges")
        return graph, node_index

    def write_graph(self, g: Graph, edges_path: Path, attributes_path: Optional[Path] = None) -> None:
        """Write the CSV pair read by load_graph"""
        edges = self.to_edge_list(g)
        pd.DataFrame(edges, columns=EDGE_HEADER).to_csv(edges_path, index=False)
        if attributes_path is not None:
            frame = pd.DataFrame(g.features, columns=[f"f{j}" for j in range(g.feature_count)])
            frame.insert(0, "node", np.arange(g.node_count))
            frame.to_csv(attributes_path, index=False, float_format="%.17g")

    @staticmethod
    def _read_csv(path: Path) -> pd.DataFrame:
        try:
            return pd.read_csv(path, dtype=str, skipinitialspace=True, keep_default_na=False)
        except pd.errors.ParserError as e:
            raise FormatError(f"malformed CSV: {e}", path=str(path))
        except pd.errors.EmptyDataError:
            raise FormatError("empty file (header required)", line=1, path=str(path))


def _natural_key(label: str):
    """Integer-looking ids sort numerically, others lexically after them"""
    return (0, int(label), "") if INTEGER_LABEL.fullmatch(label) else (1, 0, label)
