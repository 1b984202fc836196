"""Single CART classification tree (Gini), used directly and inside the forest."""

from __future__ import annotations

import math

import numpy as np

from ..rng import child_seed_seq
from . import _kernels


def _rng_state(seed: int, *tags) -> np.uint64:
    return child_seed_seq(seed, *tags).generate_state(1, np.uint64)[0]


class DecisionTree:
    def __init__(self, feature, threshold, left, right, value, n_features: int):
        self.feature = feature
        self.threshold = threshold
        self.left = left
        self.right = right
        self.value = value
        self.n_features = n_features

    @classmethod
    def fit(cls, X, y, max_depth: int, min_samples_split: int = 2,
            min_samples_leaf: int = 1, feature_subset_size: int | None = None,
            seed: int = 0, row_indices=None) -> "DecisionTree":
        X = np.ascontiguousarray(X, dtype=np.float64)
        y = np.ascontiguousarray(y, dtype=np.int64)
        if X.shape[0] == 0:
            raise ValueError("empty training data")
        order = (np.arange(X.shape[0], dtype=np.int64) if row_indices is None
                 else np.ascontiguousarray(row_indices, dtype=np.int64).copy())
        subset = feature_subset_size if feature_subset_size is not None else X.shape[1]
        out = _kernels.build_class_tree(X, y, order, max_depth, min_samples_split,
                                        min_samples_leaf, subset,
                                        _rng_state(seed, "tree"))
        feature, threshold, left, right, value, _ = out
        return cls(feature, threshold, left, right, value, X.shape[1])

    def predict_proba(self, X) -> np.ndarray:
        X = np.ascontiguousarray(X, dtype=np.float64)
        out = np.zeros(X.shape[0])
        _kernels.tree_accumulate(self.feature, self.threshold, self.left,
                                 self.right, self.value, X, out)
        return out

    def predict(self, X) -> np.ndarray:
        return (self.predict_proba(X) >= 0.5).astype(np.int8)

    @property
    def n_leaves(self) -> int:
        return int(np.sum(self.feature < 0))

    @property
    def depth(self) -> int:
        depths = np.zeros(len(self.feature), dtype=int)
        for node in range(len(self.feature)):
            if self.feature[node] >= 0:
                depths[self.left[node]] = depths[node] + 1
                depths[self.right[node]] = depths[node] + 1
        return int(depths.max())

    def to_arrays(self) -> dict:
        return {"feature": self.feature.tolist(), "threshold": self.threshold.tolist(),
                "left": self.left.tolist(), "right": self.right.tolist(),
                "value": self.value.tolist()}

    @classmethod
    def from_arrays(cls, d: dict, n_features: int) -> "DecisionTree":
        return cls(np.asarray(d["feature"], dtype=np.int64),
                   np.asarray(d["threshold"], dtype=np.float64),
                   np.asarray(d["left"], dtype=np.int64),
                   np.asarray(d["right"], dtype=np.int64),
                   np.asarray(d["value"], dtype=np.float64), n_features)


def default_feature_subset(n_features: int) -> int:
    return math.ceil(math.sqrt(n_features))
