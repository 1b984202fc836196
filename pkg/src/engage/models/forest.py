"""Random forest: bagged Gini trees with per-node feature subsets."""

from __future__ import annotations

import numpy as np

from ..rng import child_rng
from . import _kernels
from .params import RFParams
from .tree import DecisionTree, _rng_state, default_feature_subset


class RandomForest:
    kind = "rf"

    def __init__(self, params: RFParams, seed: int, trees: list[DecisionTree],
                 n_features: int):
        self.params = params
        self.seed = seed
        self.trees = trees
        self.n_features = n_features

    @classmethod
    def fit(cls, X, y, params: RFParams, seed: int) -> "RandomForest":
        X = np.ascontiguousarray(X, dtype=np.float64)
        y = np.ascontiguousarray(y, dtype=np.int64)
        n, p = X.shape
        subset = default_feature_subset(p)
        trees = []
        for t in range(params.n_estimators):
            bootstrap = child_rng(seed, "rf-bootstrap", t).integers(0, n, size=n)
            order = np.ascontiguousarray(bootstrap, dtype=np.int64)
            out = _kernels.build_class_tree(
                X, y, order, params.max_depth, params.min_samples_split,
                params.min_samples_leaf, subset, _rng_state(seed, "rf-tree", t))
            feature, threshold, left, right, value, _ = out
            trees.append(DecisionTree(feature, threshold, left, right, value, p))
        return cls(params=params, seed=seed, trees=trees, n_features=p)

    def predict_proba(self, X) -> np.ndarray:
        X = np.ascontiguousarray(X, dtype=np.float64)
        acc = np.zeros(X.shape[0])
        for tree in self.trees:
            _kernels.tree_accumulate(tree.feature, tree.threshold, tree.left,
                                     tree.right, tree.value, X, acc)
        return acc / len(self.trees)

    def predict(self, X) -> np.ndarray:
        return (self.predict_proba(X) >= 0.5).astype(np.int8)


def fit_rf(X, y, params: RFParams, seed: int) -> RandomForest:
    return RandomForest.fit(X, y, params, seed)
