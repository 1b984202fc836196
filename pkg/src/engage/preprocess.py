"""Tabular preprocessing: mean imputation, min-max scaling, isolation-forest
outlier removal, and the balanced holdout split.

Order in the batch pipeline: impute on the full table (the forest needs
complete rows), remove outliers on the unnormalized table, split, then fit
normalization on the training rows only.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import AllMissingFeature, ClassTooSmall, TooFewRows
from .pipeline import FEATURE_IDS, Dataset
from .rng import child_rng

EULER_GAMMA = 0.5772156649


# -- imputation ------------------------------------------------------------

def feature_means(ds: Dataset) -> np.ndarray:
    """Per-feature mean over observed cells; AllMissingFeature if a column is empty."""
    observed = ~np.isnan(ds.X)
    counts = observed.sum(axis=0)
    if np.any(counts == 0):
        bad = [FEATURE_IDS[i] for i in np.flatnonzero(counts == 0)]
        raise AllMissingFeature(f"no observed values for {', '.join(bad)}")
    sums = np.where(observed, ds.X, 0.0).sum(axis=0)
    return sums / counts


def impute_means(ds: Dataset, stats_from: Dataset | None = None) -> Dataset:
    """Replace missing cells with feature means from ``stats_from`` (default: ds)."""
    means = feature_means(stats_from if stats_from is not None else ds)
    out = ds.copy()
    mask = np.isnan(out.X)
    out.X[mask] = np.broadcast_to(means, out.X.shape)[mask]
    return out


# -- min-max scaling ---------------------------------------------------------

@dataclass(frozen=True)
class MinMaxParams:
    mins: np.ndarray
    maxs: np.ndarray


def minmax_fit(ds: Dataset) -> MinMaxParams:
    if np.isnan(ds.X).any():
        raise ValueError("fit scaling after imputation, not before")
    return MinMaxParams(mins=ds.X.min(axis=0), maxs=ds.X.max(axis=0))


def minmax_apply(ds: Dataset, params: MinMaxParams) -> Dataset:
    """x' = (x - min) / (max - min), constant features to 0, clamped to [0, 1]."""
    span = params.maxs - params.mins
    safe = np.where(span > 0, span, 1.0)
    out = ds.copy()
    scaled = (out.X - params.mins) / safe
    scaled[:, span == 0] = 0.0
    out.X = np.clip(scaled, 0.0, 1.0)
    return out


def save_preprocess_params(path, means: np.ndarray, params: MinMaxParams):
    doc = {fid: {"mean": float(means[i]), "min": float(params.mins[i]),
                 "max": float(params.maxs[i])}
           for i, fid in enumerate(FEATURE_IDS)}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True)


def load_preprocess_params(path) -> tuple[np.ndarray, MinMaxParams]:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    means = np.array([doc[fid]["mean"] for fid in FEATURE_IDS])
    mins = np.array([doc[fid]["min"] for fid in FEATURE_IDS])
    maxs = np.array([doc[fid]["max"] for fid in FEATURE_IDS])
    return means, MinMaxParams(mins=mins, maxs=maxs)


# -- isolation forest --------------------------------------------------------

def average_path_length(m: int) -> float:
    """c(m): average unsuccessful-search depth in a BST of m points."""
    if m <= 1:
        return 0.0
    if m == 2:
        return 1.0
    return 2.0 * (math.log(m - 1) + EULER_GAMMA) - 2.0 * (m - 1) / m


@dataclass
class _IsoTree:
    feature: np.ndarray    # -1 for external nodes
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    size: np.ndarray       # points that reached the node (external correction)


@dataclass
class IsolationForestModel:
    trees: list[_IsoTree]
    subsample_size: int
    seed: int


def _grow_iso_tree(X: np.ndarray, rng: np.random.Generator, height_limit: int) -> _IsoTree:
    feature, threshold, left, right, size = [], [], [], [], []

    def new_node():
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        size.append(0)
        return len(feature) - 1

    stack = [(new_node(), np.arange(X.shape[0]), 0)]
    while stack:
        node, idx, depth = stack.pop()
        size[node] = len(idx)
        if depth >= height_limit or len(idx) <= 1:
            continue
        sub = X[idx]
        lo, hi = sub.min(axis=0), sub.max(axis=0)
        splittable = np.flatnonzero(hi > lo)
        if splittable.size == 0:
            continue
        f = int(splittable[rng.integers(splittable.size)])
        t = float(rng.uniform(lo[f], hi[f]))
        goes_left = sub[:, f] < t
        feature[node] = f
        threshold[node] = t
        l, r = new_node(), new_node()
        left[node], right[node] = l, r
        stack.append((l, idx[goes_left], depth + 1))
        stack.append((r, idx[~goes_left], depth + 1))

    return _IsoTree(feature=np.array(feature), threshold=np.array(threshold),
                    left=np.array(left), right=np.array(right), size=np.array(size))


def isoforest_fit(ds: Dataset, seed: int, n_trees: int = 100,
                  subsample: int = 256) -> IsolationForestModel:
    """Fit isolation trees on random subsamples (size capped at n)."""
    if ds.n < 2:
        raise TooFewRows("isolation forest needs at least 2 rows")
    if np.isnan(ds.X).any():
        raise ValueError("impute before fitting the isolation forest")
    psi = min(subsample, ds.n)
    height_limit = math.ceil(math.log2(psi)) if psi > 1 else 0
    trees = []
    for k in range(n_trees):
        rng = child_rng(seed, "isoforest", k)
        idx = rng.choice(ds.n, size=psi, replace=False)
        trees.append(_grow_iso_tree(ds.X[idx], rng, height_limit))
    return IsolationForestModel(trees=trees, subsample_size=psi, seed=seed)


def _tree_path_length(tree: _IsoTree, x: np.ndarray) -> float:
    node, depth = 0, 0
    while tree.feature[node] >= 0:
        node = tree.left[node] if x[tree.feature[node]] < tree.threshold[node] \
            else tree.right[node]
        depth += 1
    return depth + average_path_length(int(tree.size[node]))


def isoforest_score(model: IsolationForestModel, x: np.ndarray) -> float:
    """Anomaly score 2^(-E[h(x)] / c(psi)) in (0, 1); higher is more anomalous."""
    total = 0.0
    for tree in model.trees:  # fixed order: sum then divide
        total += _tree_path_length(tree, x)
    mean_h = total / len(model.trees)
    return float(2.0 ** (-mean_h / average_path_length(model.subsample_size)))


def isoforest_scores(model: IsolationForestModel, ds: Dataset) -> np.ndarray:
    return np.array([isoforest_score(model, ds.X[i]) for i in range(ds.n)])


def remove_outliers(ds: Dataset, contamination: float, seed: int,
                    ) -> tuple[Dataset, Dataset]:
    """Drop the ceil(contamination * n) highest-scoring rows.

    Returns (kept, removed). Ties and float fuzz are settled by row index.
    """
    if not 0.0 < contamination < 0.5:
        raise ValueError("contamination must be in (0, 0.5)")
    model = isoforest_fit(ds, seed=seed)
    scores = isoforest_scores(model, ds)
    k = math.ceil(contamination * ds.n - 1e-9)
    order = np.lexsort((np.arange(ds.n), -scores))  # score desc, then index asc
    drop = np.sort(order[:k])
    keep = np.sort(order[k:])
    return ds.subset(keep), ds.subset(drop)


# -- balanced holdout split ---------------------------------------------------

@dataclass(frozen=True)
class SplitSpec:
    holdout_per_class: int = 9
    seed: int = 0


def balanced_holdout_split(ds: Dataset, spec: SplitSpec) -> tuple[Dataset, Dataset]:
    """Random, seeded, class-balanced holdout; remainder becomes training."""
    test_idx = []
    for cls in (0, 1):
        members = np.flatnonzero(ds.y == cls)
        if members.size < spec.holdout_per_class:
            raise ClassTooSmall(
                f"class {cls} has {members.size} rows < {spec.holdout_per_class}")
        rng = child_rng(spec.seed, "holdout", cls)
        test_idx.extend(rng.choice(members, size=spec.holdout_per_class, replace=False))
    test_idx = np.sort(np.asarray(test_idx))
    train_idx = np.setdiff1d(np.arange(ds.n), test_idx)
    return ds.subset(train_idx), ds.subset(test_idx)
