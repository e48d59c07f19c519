"""
Base regressors: ordinary least squares and CART regression trees
"""
from typing import Optional, Tuple

import numpy as np

from services.base_service import BaseService
from models.estimators import BaseLearner, LinearModel, RegressionNode, RegressionTree
from utils.exceptions import ArgumentError

RIDGE_JITTER = 1e-8
DEFAULT_MIN_LEAF = 5
DEFAULT_MAX_DEPTH = 12
DEFAULT_MAX_CANDIDATES = 64


def split_candidates(column: np.ndarray, max_candidates: Optional[int] = None) -> np.ndarray:
    """
    Midpoints between consecutive sorted unique values.

    Above `max_candidates` unique values the midpoints are thinned to evenly
    spaced quantile positions (always ascending, always real midpoints).
    """
    unique = np.unique(column)
    if unique.size < 2:
        return np.zeros(0)
    midpoints = (unique[:-1] + unique[1:]) / 2.0
    if max_candidates is not None and midpoints.size > max_candidates:
        picks = np.unique(np.linspace(0, midpoints.size - 1, max_candidates).round().astype(int))
        midpoints = midpoints[picks]
    return midpoints


class LearnerService(BaseService):
    """From-scratch regressors used by the baselines and the ST-Learner"""

    def fit_ols(self, X: np.ndarray, y: np.ndarray) -> LinearModel:
        """
        Least squares via centered normal equations with a 1e-8 ridge jitter

        Args:
            X: (n, d) feature matrix
            y: (n,) targets

        Returns:
            LinearModel; zero-variance features get coefficient 0 and the
            intercept absorbs the mean
        """
        X, y = self._check_xy(X, y)
        x_mean = X.mean(axis=0)
        y_mean = float(y.mean())
        Xc = X - x_mean
        gram = Xc.T @ Xc + RIDGE_JITTER * np.eye(X.shape[1])
        coefficients = np.linalg.solve(gram, Xc.T @ (y - y_mean)) if X.shape[1] else np.zeros(0)
        intercept = y_mean - float(x_mean @ coefficients) if X.shape[1] else y_mean
        return LinearModel(coefficients=coefficients.tolist(), intercept=intercept)

    def fit_cart(
        self,
        X: np.ndarray,
        y: np.ndarray,
        min_leaf: int = DEFAULT_MIN_LEAF,
        max_depth: int = DEFAULT_MAX_DEPTH,
        max_candidates: Optional[int] = DEFAULT_MAX_CANDIDATES,
    ) -> RegressionTree:
        """
        Greedy SSE-reduction regression tree

        Args:
            X: (n, d) feature matrix
            y: (n,) targets
            min_leaf: Minimum samples per leaf
            max_depth: Maximum depth (root has depth 0)
            max_candidates: Per-feature cap on split candidates

        Returns:
            RegressionTree whose leaves predict the mean of their samples
        """
        X, y = self._check_xy(X, y)
        if min_leaf < 1 or min_leaf > X.shape[0]:
            raise ArgumentError(f"min_leaf must lie in [1, {X.shape[0]}], got {min_leaf}")
        if max_depth < 0:
            raise ArgumentError(f"max_depth must be >= 0, got {max_depth}")
        root = self._grow(X, y, np.arange(X.shape[0]), 0, min_leaf, max_depth, max_candidates)
        return RegressionTree(root=root, dimension=X.shape[1], min_leaf=min_leaf, max_depth=max_depth)

    def _grow(self, X, y, rows, depth, min_leaf, max_depth, max_candidates) -> RegressionNode:
        targets = y[rows]
        leaf = RegressionNode(value=float(targets.mean()), n_samples=int(rows.size))
        if depth >= max_depth or rows.size < 2 * min_leaf or np.ptp(targets) == 0.0:
            return leaf

        best = self._best_split(X[rows], targets, min_leaf, max_candidates)
        if best is None:
            return leaf
        feature, split_value = best
        goes_left = X[rows, feature] <= split_value
        return RegressionNode(
            value=leaf.value, n_samples=leaf.n_samples, feature=feature, split_value=split_value,
            left=self._grow(X, y, rows[goes_left], depth + 1, min_leaf, max_depth, max_candidates),
            right=self._grow(X, y, rows[~goes_left], depth + 1, min_leaf, max_depth, max_candidates),
        )

    @staticmethod
    def _best_split(X: np.ndarray, y: np.ndarray, min_leaf: int,
                    max_candidates: Optional[int]) -> Optional[Tuple[int, float]]:
        """Lowest total SSE; ties go to the lowest feature, then the smallest split"""
        n = y.size
        centered = y - y.mean()
        parent_sse = float(centered @ centered)
        best_sse, best = parent_sse, None
        tolerance = 1e-12 * max(parent_sse, 1.0)

        for feature in range(X.shape[1]):
            column = X[:, feature]
            candidates = split_candidates(column, max_candidates)
            if candidates.size == 0:
                continue
            order = np.argsort(column, kind="stable")
            sorted_x, sorted_y = column[order], centered[order]
            cum = np.concatenate([[0.0], np.cumsum(sorted_y)])
            cum_sq = np.concatenate([[0.0], np.cumsum(sorted_y ** 2)])
            left_n = np.searchsorted(sorted_x, candidates, side="right")
            valid = (left_n >= min_leaf) & (n - left_n >= min_leaf)
            if not valid.any():
                continue
            left_n, candidates = left_n[valid], candidates[valid]
            right_n = n - left_n
            left_sum, left_sq = cum[left_n], cum_sq[left_n]
            right_sum, right_sq = cum[-1] - left_sum, cum_sq[-1] - left_sq
            sse = (left_sq - left_sum ** 2 / left_n) + (right_sq - right_sum ** 2 / right_n)
            i = int(np.argmin(sse))
            if sse[i] < best_sse - tolerance:
                best_sse, best = float(sse[i]), (feature, float(candidates[i]))
        return best

    def predict(self, model: BaseLearner, x: np.ndarray) -> float:
        """Prediction for one feature vector"""
        x = np.asarray(x, dtype=float)
        if x.shape != (model.dimension,):
            raise ArgumentError(f"expected a feature vector of length {model.dimension}, got shape {x.shape}")
        if isinstance(model, LinearModel):
            return float(x @ np.asarray(model.coefficients) + model.intercept)
        node = model.root
        while not node.is_leaf:
            node = node.left if x[node.feature] <= node.split_value else node.right
        return node.value

    def predict_many(self, model: BaseLearner, X: np.ndarray) -> np.ndarray:
        """Vectorized prediction; identical to row-wise predict"""
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != model.dimension:
            raise ArgumentError(f"expected an (n, {model.dimension}) matrix, got shape {X.shape}")
        if isinstance(model, LinearModel):
            return X @ np.asarray(model.coefficients, dtype=float) + model.intercept
        out = np.empty(X.shape[0])
        stack = [(model.root, np.arange(X.shape[0]))]
        while stack:
            node, rows = stack.pop()
            if rows.size == 0:
                continue
            if node.is_leaf:
                out[rows] = node.value
                continue
            goes_left = X[rows, node.feature] <= node.split_value
            stack.append((node.left, rows[goes_left]))
            stack.append((node.right, rows[~goes_left]))
        return out

    @staticmethod
    def _check_xy(X, y) -> Tuple[np.ndarray, np.ndarray]:
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        if X.shape[0] == 0 or y.size == 0:
            raise ArgumentError("cannot fit on empty input")
        if X.ndim != 2 or y.shape != (X.shape[0],):
            raise ArgumentError(f"X shape {X.shape} does not match y shape {y.shape}")
        return X, y
