"""
Fitted estimator models
"""
from typing import List, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator


class LinearModel(BaseModel):
    """Ordinary least squares fit"""
    coefficients: List[float]
    intercept: float

    @property
    def dimension(self) -> int:
        return len(self.coefficients)


class RegressionNode(BaseModel):
    """
    CART node: a split (feature, split_value, left, right) or a leaf (value).

    Samples with x[feature] <= split_value go left.
    """
    value: float
    n_samples: int
    feature: Optional[int] = None
    split_value: Optional[float] = None
    left: Optional["RegressionNode"] = None
    right: Optional["RegressionNode"] = None

    @property
    def is_leaf(self) -> bool:
        return self.feature is None


class RegressionTree(BaseModel):
    root: RegressionNode
    dimension: int
    min_leaf: int
    max_depth: int

    def leaves(self) -> List[RegressionNode]:
        stack, found = [self.root], []
        while stack:
            node = stack.pop()
            if node.is_leaf:
                found.append(node)
            else:
                stack.extend([node.right, node.left])
        return found

    def depth(self) -> int:
        def _depth(node: RegressionNode) -> int:
            return 0 if node.is_leaf else 1 + max(_depth(node.left), _depth(node.right))
        return _depth(self.root)


class TriggerNode(BaseModel):
    """
    Trigger tree node. Leaves carry the trigger (estimated threshold) and the
    effect M1 - M0 measured on the leaf's training rows.
    """
    trigger: float
    effect: float
    n_train: int
    n_val: int
    feature: Optional[int] = None
    split_value: Optional[float] = None
    left: Optional["TriggerNode"] = None
    right: Optional["TriggerNode"] = None

    @property
    def is_leaf(self) -> bool:
        return self.feature is None


class TriggerTree(BaseModel):
    root: TriggerNode
    dimension: int

    def leaves(self) -> List[TriggerNode]:
        stack, found = [self.root], []
        while stack:
            node = stack.pop()
            if node.is_leaf:
                found.append(node)
            else:
                stack.extend([node.right, node.left])
        return found

    def depth(self) -> int:
        def _depth(node: TriggerNode) -> int:
            return 0 if node.is_leaf else 1 + max(_depth(node.left), _depth(node.right))
        return _depth(self.root)


BaseLearner = Union[LinearModel, RegressionTree]


class STModel(BaseModel):
    """
    ST-Learner: one base learner f over (x, I) with I as the LAST input column,
    a frozen treatment grid `betas` (sorted and deduplicated on construction)
    and triggers betas[1:].

    `max_influence` is the largest influence seen in training; nodes whose
    sweep shows no positive effect are censored there.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True)

    learner: BaseLearner
    betas: np.ndarray
    grid: str = Field(default="uniform101")
    max_influence: float = Field(default=1.0, ge=0.0, le=1.0)

    @model_validator(mode="after")
    def _check_grid(self) -> "STModel":
        betas = np.asarray(self.betas, dtype=float)
        if betas.ndim != 1:
            raise ValueError("treatment grid must be one-dimensional")
        betas = np.unique(betas)
        if betas.size < 2:
            raise ValueError("treatment grid needs at least two levels")
        self.betas = betas
        return self

    @property
    def triggers(self) -> np.ndarray:
        return self.betas[1:]

    @property
    def dimension(self) -> int:
        """Feature dimension of x (without the influence column)"""
        return self.learner.dimension - 1


RegressionNode.model_rebuild()
TriggerNode.model_rebuild()
