"""
ST-Learner: one base learner over (features, influence) swept across treatment levels
"""
from typing import Tuple

import numpy as np

from services.base_service import BaseService
from services.learner_service import LearnerService, DEFAULT_MAX_DEPTH, DEFAULT_MIN_LEAF
from services.causal_tree_service import TIE_TOLERANCE, UNIFORM_GRID
from models.diffusion import TrainingTable
from models.estimators import STModel
from utils.exceptions import ArgumentError

BASE_LEARNERS = ("ols", "cart")
GRIDS = ("observed", "uniform101")
PREDICT_CHUNK_ROWS = 200_000


class STLearnerService(BaseService):
    """
    Fits f(x, I) -> E[Y | X = x, I] once, then reads each node's trigger off the
    counterfactual sweep f(x, beta) over the frozen treatment grid.
    """

    def __init__(self):
        super().__init__()
        self.learner_service = LearnerService()

    def fit(
        self,
        table: TrainingTable,
        base: str = "cart",
        grid: str = "uniform101",
        min_leaf: int = DEFAULT_MIN_LEAF,
        max_depth: int = DEFAULT_MAX_DEPTH,
    ) -> STModel:
        """
        Fit the base learner on (x, I) with I appended as the last column

        Args:
            table: Training rows
            base: "ols" or "cart"
            grid: "observed" (unique influences) or "uniform101"
            min_leaf: CART minimum leaf size
            max_depth: CART maximum depth

        Returns:
            STModel with ascending, deduplicated betas
        """
        if len(table) == 0:
            raise ArgumentError("cannot fit the ST-Learner on an empty table")
        if base not in BASE_LEARNERS:
            raise ArgumentError(f"unknown base learner: {base}")
        if grid not in GRIDS:
            raise ArgumentError(f"unknown treatment grid: {grid}")

        inputs = np.column_stack([table.x, table.influence])
        outcomes = table.y.astype(float)
        if base == "ols":
            learner = self.learner_service.fit_ols(inputs, outcomes)
        else:
            learner = self.learner_service.fit_cart(inputs, outcomes, min_leaf=min(min_leaf, len(table)),
                                                    max_depth=max_depth)

        betas = UNIFORM_GRID.copy()
        if grid == "observed":
            observed = np.unique(table.influence)
            if observed.size >= 2:
                betas = observed
            else:
                self.log_warning(f"Only {observed.size} distinct influence value(s); using the uniform grid")
                grid = "uniform101"

        self.log_debug(f"Fitted ST-Learner ({base}) with {betas.size} treatment levels")
        return STModel(learner=learner, betas=betas, grid=grid,
                       max_influence=float(np.clip(table.influence.max(), 0.0, 1.0)))

    def predict_trigger(self, model: STModel, x) -> Tuple[float, float]:
        """
        Trigger maximizing mean{f(x, b) : b >= r} - mean{f(x, b) : b < r}

        Ties go to the smallest trigger; the effect is clamped to [-1, 1].
        """
        x = np.asarray(x, dtype=float)
        if x.shape != (model.dimension,):
            raise ArgumentError(f"expected a feature vector of length {model.dimension}, got shape {x.shape}")
        triggers, effects = self.predict_triggers(model, x.reshape(1, -1))
        return float(triggers[0]), float(effects[0])

    def predict_triggers(self, model: STModel, X) -> Tuple[np.ndarray, np.ndarray]:
        """Batch predict_trigger; every node costs exactly len(betas) learner evaluations"""
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != model.dimension:
            raise ArgumentError(f"expected an (n, {model.dimension}) matrix, got shape {X.shape}")
        betas = model.betas
        levels = betas.size
        triggers, effects = np.empty(X.shape[0]), np.empty(X.shape[0])
        chunk = max(1, PREDICT_CHUNK_ROWS // levels)

        for start in range(0, X.shape[0], chunk):
            block = X[start:start + chunk]
            inputs = np.column_stack([np.repeat(block, levels, axis=0), np.tile(betas, block.shape[0])])
            sweep = self.learner_service.predict_many(model.learner, inputs).reshape(block.shape[0], levels)
            block_triggers, block_effects = self._sweep_effects(sweep, betas)
            triggers[start:start + chunk] = block_triggers
            effects[start:start + chunk] = block_effects
        return triggers, effects

    def estimate_thresholds(self, model: STModel, X) -> Tuple[np.ndarray, np.ndarray]:
        """
        Node thresholds from the sweep, with right-censoring

        A node whose sweep has no positive effect never activated at any
        training influence level, so its threshold lies above that range and
        is reported as model.max_influence.

        Returns:
            (thresholds, censored mask)
        """
        triggers, effects = self.predict_triggers(model, X)
        censored = effects <= TIE_TOLERANCE
        if censored.any():
            self.log_debug(f"{int(censored.sum())}/{censored.size} node(s) censored at {model.max_influence:.3f}")
        return np.where(censored, model.max_influence, triggers), censored

    @staticmethod
    def _sweep_effects(sweep: np.ndarray, betas: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Best (trigger, effect) per row of f evaluations at betas"""
        levels = betas.size
        cum = np.concatenate([np.zeros((sweep.shape[0], 1)), np.cumsum(sweep, axis=1)], axis=1)
        below = np.arange(1, levels)
        below_mean = cum[:, below] / below
        above_mean = (cum[:, [levels]] - cum[:, below]) / (levels - below)
        effect = above_mean - below_mean
        best = effect.max(axis=1, keepdims=True)
        index = np.argmax(effect >= best - TIE_TOLERANCE, axis=1)
        rows = np.arange(sweep.shape[0])
        return betas[1:][index], np.clip(effect[rows, index], -1.0, 1.0)
