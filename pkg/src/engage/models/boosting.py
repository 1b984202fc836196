"""Gradient-boosted trees with logistic loss and Newton leaf values.

Stagewise: start from the log-odds of the base rate, fit a squared-error
regression tree to the residuals y - sigmoid(F), replace each leaf value by
a clamped Newton step, and advance F by learning_rate times the tree.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import DegenerateLabels
from . import _kernels
from .params import GBTParams
from .tree import DecisionTree

LEAF_CLAMP = 4.0


def _sigmoid(z: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-np.clip(z, -500, 500)))


class GradientBoosting:
    kind = "gbt"

    def __init__(self, params: GBTParams, seed: int, f0: float,
                 trees: list[DecisionTree], n_features: int):
        self.params = params
        self.seed = seed
        self.f0 = f0
        self.trees = trees
        self.n_features = n_features

    @classmethod
    def fit(cls, X, y, params: GBTParams, seed: int) -> "GradientBoosting":
        X = np.ascontiguousarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        pbar = y.mean()
        if pbar == 0.0 or pbar == 1.0:
            raise DegenerateLabels("boosting needs both classes present")
        f0 = math.log(pbar / (1.0 - pbar))
        F = np.full(X.shape[0], f0)
        trees = []
        for _ in range(params.iterations):
            prob = _sigmoid(F)
            grad = y - prob
            hess = prob * (1.0 - prob)
            arrays = _kernels.build_reg_tree(X, grad, hess, params.depth, 1, LEAF_CLAMP)
            tree = DecisionTree(*arrays, n_features=X.shape[1])
            F = F + params.learning_rate * tree.predict_proba(X)
            trees.append(tree)
        return cls(params=params, seed=seed, f0=f0, trees=trees, n_features=X.shape[1])

    def decision_function(self, X) -> np.ndarray:
        X = np.ascontiguousarray(X, dtype=np.float64)
        acc = np.zeros(X.shape[0])
        for tree in self.trees:
            _kernels.tree_accumulate(tree.feature, tree.threshold, tree.left,
                                     tree.right, tree.value, X, acc)
        return self.f0 + self.params.learning_rate * acc

    def predict_proba(self, X) -> np.ndarray:
        return _sigmoid(self.decision_function(X))

    def predict(self, X) -> np.ndarray:
        return (self.predict_proba(X) >= 0.5).astype(np.int8)

    def staged_train_log_loss(self, X, y) -> np.ndarray:
        """Train log-loss after each stage; used to check boosting monotonicity."""
        X = np.ascontiguousarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        F = np.full(X.shape[0], self.f0)
        losses = []
        for tree in self.trees:
            F = F + self.params.learning_rate * tree.predict_proba(X)
            p = np.clip(_sigmoid(F), 1e-15, 1 - 1e-15)
            losses.append(float(-np.mean(y * np.log(p) + (1 - y) * np.log(1 - p))))
        return np.asarray(losses)


def fit_gbt(X, y, params: GBTParams, seed: int) -> GradientBoosting:
    return GradientBoosting.fit(X, y, params, seed)
