"""
Trigger-based causal tree for node threshold estimation
"""
from typing import List, Optional, Tuple

import numpy as np

from services.base_service import BaseService
from services.learner_service import split_candidates
from models.diffusion import TrainingTable
from models.estimators import TriggerNode, TriggerTree
from utils.exceptions import ArgumentError, DegeneratePartitionError, FormatError

TIE_TOLERANCE = 1e-12
UNIFORM_GRID = np.linspace(0.0, 1.0, 101)
DEFAULT_MIN_LEAF = 10
DEFAULT_MAX_DEPTH = 10
DEFAULT_VAL_FRACTION = 0.5
DEFAULT_MIN_SIDE = 2
DEFAULT_MAX_SPLIT_CANDIDATES = 32


def _scan(sorted_influence: np.ndarray, cum_outcome: np.ndarray, candidates: np.ndarray,
          min_side: int) -> np.ndarray:
    """
    Effect mean(y | I >= r) - mean(y | I < r) for every candidate r.

    `cum_outcome` is the prefix sum of outcomes in influence order, with a
    leading 0. Candidates leaving fewer than min_side rows on a side get NaN.
    """
    n = sorted_influence.size
    below = np.searchsorted(sorted_influence, candidates, side="left")
    above = n - below
    valid = (below >= min_side) & (above >= min_side)
    effects = np.full(candidates.size, np.nan)
    if valid.any():
        b, a = below[valid], above[valid]
        effects[valid] = (cum_outcome[n] - cum_outcome[b]) / a - cum_outcome[b] / b
    return effects


def _argmax_smallest(effects: np.ndarray) -> Optional[int]:
    """Index of the maximal effect, earliest (smallest trigger) among ties"""
    if effects.size == 0 or np.all(np.isnan(effects)):
        return None
    best = np.nanmax(effects)
    return int(np.flatnonzero(effects >= best - TIE_TOLERANCE)[0])


class _TriggerTreeGrower:
    """Recursive partitioning state for one fit"""

    def __init__(self, table: TrainingTable, min_leaf: int, max_depth: int, grid: str,
                 min_side: int, max_split_candidates: Optional[int], logger):
        self.table = table
        self.min_leaf = min_leaf
        self.max_depth = max_depth
        self.grid = grid
        self.min_side = min_side
        self.max_split_candidates = max_split_candidates
        self.logger = logger

    def candidates(self, sorted_influence: np.ndarray) -> np.ndarray:
        if self.grid == "uniform101":
            return UNIFORM_GRID
        return np.unique(sorted_influence)

    def partition(self, sorted_influence: np.ndarray, sorted_outcome: np.ndarray) -> Tuple[float, float, bool]:
        """(trigger, effect, valid) of one partition given influence-sorted rows"""
        if sorted_influence.size == 0:
            return 0.0, 0.0, False
        cum = np.concatenate([[0.0], np.cumsum(sorted_outcome)])
        candidates = self.candidates(sorted_influence)
        effects = _scan(sorted_influence, cum, candidates, self.min_side)
        i = _argmax_smallest(effects)
        if i is None:
            return float(np.median(sorted_influence)), 0.0, False
        return float(candidates[i]), float(effects[i]), True

    def honest_measure(self, rows: np.ndarray, trigger: float) -> float:
        """N * F evaluated on held-out rows at a fixed trigger (0 if a side is empty)"""
        if rows.size == 0:
            return 0.0
        influence = self.table.influence[rows]
        outcome = self.table.y[rows].astype(float)
        above = influence >= trigger
        if above.all() or not above.any():
            return 0.0
        return rows.size * (outcome[above].mean() - outcome[~above].mean())

    def grow(self, train_rows: np.ndarray, val_rows: np.ndarray, depth: int) -> TriggerNode:
        table = self.table
        order = train_rows[np.argsort(table.influence[train_rows], kind="stable")]
        sorted_influence = table.influence[order]
        sorted_outcome = table.y[order].astype(float)
        trigger, effect, _ = self.partition(sorted_influence, sorted_outcome)
        leaf = TriggerNode(trigger=trigger, effect=effect, n_train=int(train_rows.size), n_val=int(val_rows.size))

        if depth >= self.max_depth or train_rows.size < 2 * self.min_leaf:
            return leaf

        # maximize N_l1 * F(l1) + N_l2 * F(l2), each child re-searching its trigger
        best_measure, best = train_rows.size * effect, None
        tolerance = TIE_TOLERANCE * max(train_rows.size, 1)
        for feature in range(table.feature_count):
            column = table.x[order, feature]
            for split_value in split_candidates(column, self.max_split_candidates):
                goes_left = column <= split_value
                n_left = int(goes_left.sum())
                if n_left < self.min_leaf or train_rows.size - n_left < self.min_leaf:
                    continue
                left = self.partition(sorted_influence[goes_left], sorted_outcome[goes_left])
                right = self.partition(sorted_influence[~goes_left], sorted_outcome[~goes_left])
                measure = n_left * left[1] + (train_rows.size - n_left) * right[1]
                if measure > best_measure + tolerance:
                    best_measure, best = measure, (feature, float(split_value), left[0], right[0])

        if best is None:
            return leaf
        feature, split_value, left_trigger, right_trigger = best
        val_left = val_rows[table.x[val_rows, feature] <= split_value]
        val_right = val_rows[table.x[val_rows, feature] > split_value]
        if val_rows.size:
            parent_val = self.honest_measure(val_rows, trigger)
            child_val = self.honest_measure(val_left, left_trigger) + self.honest_measure(val_right, right_trigger)
            if child_val < parent_val - tolerance:
                self.logger.debug(f"Rejected split on feature {feature} at depth {depth} by validation")
                return leaf

        train_left = train_rows[table.x[train_rows, feature] <= split_value]
        train_right = train_rows[table.x[train_rows, feature] > split_value]
        return TriggerNode(
            trigger=trigger, effect=effect, n_train=leaf.n_train, n_val=leaf.n_val,
            feature=feature, split_value=split_value,
            left=self.grow(train_left, val_left, depth + 1),
            right=self.grow(train_right, val_right, depth + 1),
        )


class CausalTreeService(BaseService):
    """
    Causal tree whose partitions carry the trigger maximizing
    F(l, r) = M1(l, r) - M0(l, r), the CAPE with a trigger.
    """

    def trigger_effects(self, influences, outcomes, candidates, min_side: int = 1) -> np.ndarray:
        """Effect of every candidate trigger (NaN where a side is too small)"""
        influences = np.asarray(influences, dtype=float)
        outcomes = np.asarray(outcomes, dtype=float)
        candidates = np.asarray(candidates, dtype=float)
        if influences.shape != outcomes.shape:
            raise ArgumentError("influences and outcomes must align")
        order = np.argsort(influences, kind="stable")
        cum = np.concatenate([[0.0], np.cumsum(outcomes[order])])
        return _scan(influences[order], cum, candidates, min_side)

    def best_trigger(self, influences, outcomes, candidates, min_side: int = 1) -> Tuple[float, float]:
        """
        Trigger maximizing mean(y | I >= r) - mean(y | I < r)

        Args:
            influences: Activation influence per row
            outcomes: Outcome bit per row
            candidates: Ascending candidate triggers
            min_side: Minimum rows required on each side of a candidate

        Returns:
            Tuple of (trigger, effect); ties go to the smallest trigger

        Raises:
            DegeneratePartitionError: no candidate has both sides populated
        """
        candidates = np.asarray(candidates, dtype=float)
        if candidates.size > 1 and np.any(np.diff(candidates) < 0):
            raise ArgumentError("candidates must be sorted ascending")
        effects = self.trigger_effects(influences, outcomes, candidates, min_side)
        i = _argmax_smallest(effects)
        if i is None:
            raise DegeneratePartitionError("no candidate trigger leaves both sides populated")
        return float(candidates[i]), float(effects[i])

    def fit(
        self,
        table: TrainingTable,
        min_leaf: int = DEFAULT_MIN_LEAF,
        max_depth: int = DEFAULT_MAX_DEPTH,
        val_fraction: float = DEFAULT_VAL_FRACTION,
        rng_seed: int = 0,
        grid: str = "observed",
        min_side: int = DEFAULT_MIN_SIDE,
        max_split_candidates: Optional[int] = DEFAULT_MAX_SPLIT_CANDIDATES,
    ) -> TriggerTree:
        """
        Grow a trigger tree with honest validation

        Args:
            table: Training rows
            min_leaf: Minimum training rows per leaf
            max_depth: Maximum depth
            val_fraction: Share of rows held out to validate splits
            rng_seed: Seed for the train/validation split
            grid: "observed" (unique influences per partition) or "uniform101"
            min_side: Minimum rows on each side of a trigger
            max_split_candidates: Per-feature cap on split values

        Returns:
            TriggerTree
        """
        if len(table) == 0:
            raise ArgumentError("cannot fit a trigger tree on an empty table")
        if not 0.0 <= val_fraction < 1.0:
            raise ArgumentError(f"val_fraction must lie in [0, 1), got {val_fraction}")
        if grid not in ("observed", "uniform101"):
            raise ArgumentError(f"unknown trigger grid: {grid}")
        if min_leaf < 1 or max_depth < 0:
            raise ArgumentError("min_leaf must be >= 1 and max_depth >= 0")

        n = len(table)
        permutation = self.rng(rng_seed).permutation(n)
        n_val = min(int(n * val_fraction), n - 1)
        val_rows, train_rows = np.sort(permutation[:n_val]), np.sort(permutation[n_val:])

        grower = _TriggerTreeGrower(table, min_leaf, max_depth, grid, min_side, max_split_candidates, self.logger)
        tree = TriggerTree(root=grower.grow(train_rows, val_rows, 0), dimension=table.feature_count)
        self.log_debug(f"Fitted trigger tree: depth {tree.depth()}, {len(tree.leaves())} leaves")
        return tree

    def predict_threshold(self, tree: TriggerTree, x) -> Tuple[float, float]:
        """Route x to its leaf and read (trigger, effect)"""
        x = np.asarray(x, dtype=float)
        if x.shape != (tree.dimension,):
            raise ArgumentError(f"expected a feature vector of length {tree.dimension}, got shape {x.shape}")
        node = tree.root
        while not node.is_leaf:
            node = node.left if x[node.feature] <= node.split_value else node.right
        return node.trigger, node.effect

    def predict_thresholds(self, tree: TriggerTree, X) -> Tuple[np.ndarray, np.ndarray]:
        """Batch predict_threshold"""
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != tree.dimension:
            raise ArgumentError(f"expected an (n, {tree.dimension}) matrix, got shape {X.shape}")
        triggers, effects = np.empty(X.shape[0]), np.empty(X.shape[0])
        stack = [(tree.root, np.arange(X.shape[0]))]
        while stack:
            node, rows = stack.pop()
            if rows.size == 0:
                continue
            if node.is_leaf:
                triggers[rows], effects[rows] = node.trigger, node.effect
                continue
            goes_left = X[rows, node.feature] <= node.split_value
            stack.append((node.left, rows[goes_left]))
            stack.append((node.right, rows[~goes_left]))
        return triggers, effects

    def dumps(self, tree: TriggerTree) -> str:
        """One node per line, preorder: kind feature value trigger effect n_train n_val"""
        lines = [f"# dimension={tree.dimension}"]
        stack = [tree.root]
        while stack:
            node = stack.pop()
            if node.is_leaf:
                lines.append(f"leaf\t-\t-\t{node.trigger!r}\t{node.effect!r}\t{node.n_train}\t{node.n_val}")
            else:
                lines.append(f"split\t{node.feature}\t{node.split_value!r}\t{node.trigger!r}\t{node.effect!r}"
                             f"\t{node.n_train}\t{node.n_val}")
                stack.extend([node.right, node.left])
        return "\n".join(lines) + "\n"

    def loads(self, text: str) -> TriggerTree:
        """Inverse of dumps"""
        lines = [line for line in text.splitlines() if line.strip()]
        if not lines or not lines[0].startswith("# dimension="):
            raise FormatError("missing '# dimension=' header", line=1)
        dimension = int(lines[0].split("=", 1)[1])
        position = [1]

        def _read() -> TriggerNode:
            index = position[0]
            if index >= len(lines):
                raise FormatError("truncated tree dump", line=index + 1)
            fields: List[str] = lines[index].split("\t")
            position[0] += 1
            if len(fields) != 7 or fields[0] not in ("leaf", "split"):
                raise FormatError(f"malformed node line: {lines[index]}", line=index + 1)
            kind, feature, value, trigger, effect, n_train, n_val = fields
            common = dict(trigger=float(trigger), effect=float(effect), n_train=int(n_train), n_val=int(n_val))
            if kind == "leaf":
                return TriggerNode(**common)
            left = _read()
            right = _read()
            return TriggerNode(feature=int(feature), split_value=float(value), left=left, right=right, **common)

        root = _read()
        if position[0] != len(lines):
            raise FormatError("trailing lines after tree dump", line=position[0] + 1)
        return TriggerTree(root=root, dimension=dimension)
