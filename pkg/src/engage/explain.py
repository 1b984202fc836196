"""Model-agnostic Shapley attribution and the mean-|value| feature ranking.

One Monte-Carlo permutation estimator serves all three classifier families:
each iteration draws a feature permutation and a background row, then walks
the permutation replacing background values with the explained row's values,
crediting each feature with the change in predicted probability.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .pipeline import FEATURE_IDS, FEATURE_REGISTRY, Dataset
from .rng import child_rng


@dataclass(frozen=True)
class ShapleyEstimate:
    phi: np.ndarray
    total_mean: float   # mean over iterations of f(x) - f(z)
    total_sd: float     # sd of those per-iteration totals


def shapley_sample_detailed(model, x: np.ndarray, background: np.ndarray,
                            m: int, seed: int, *tags) -> ShapleyEstimate:
    x = np.asarray(x, dtype=float)
    background = np.asarray(background, dtype=float)
    p = x.shape[0]
    rng = child_rng(seed, "shapley", *tags)
    perms = np.stack([rng.permutation(p) for _ in range(m)])
    z_rows = background[rng.integers(0, background.shape[0], size=m)]

    pos = np.argsort(perms, axis=1)  # pos[t, j] = position of feature j in perm t
    mask = pos[:, None, :] < np.arange(p + 1)[None, :, None]
    grid = np.where(mask, x[None, None, :], z_rows[:, None, :])
    f = np.asarray(model.predict_proba(grid.reshape(-1, p)), dtype=float)
    f = f.reshape(m, p + 1)

    diffs = f[:, 1:] - f[:, :-1]
    per_feature = np.take_along_axis(diffs, pos, axis=1)  # column j = feature j
    totals = f[:, -1] - f[:, 0]
    return ShapleyEstimate(phi=per_feature.mean(axis=0),
                           total_mean=float(totals.mean()),
                           total_sd=float(totals.std()))


def shapley_sample(model, x, background, m: int, seed: int, *tags) -> np.ndarray:
    return shapley_sample_detailed(model, x, background, m, seed, *tags).phi


@dataclass(frozen=True)
class ShapEntry:
    feature_id: str
    dimension: str
    mean_abs: float
    rank: int


@dataclass
class ShapReport:
    by_kind: dict[str, list[ShapEntry]]  # entries sorted by rank

    def ranking(self, kind: str) -> list[str]:
        return [e.feature_id for e in self.by_kind[kind]]

    def write_csv(self, path):
        with open(path, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["kind", "feature_id", "dimension", "mean_abs_shap", "rank"])
            for kind in sorted(self.by_kind):
                for e in self.by_kind[kind]:
                    w.writerow([kind, e.feature_id, e.dimension, repr(e.mean_abs),
                                e.rank])

    @classmethod
    def read_csv(cls, path) -> "ShapReport":
        by_kind: dict[str, list[ShapEntry]] = {}
        with open(path, encoding="utf-8", newline="") as fh:
            for rec in csv.DictReader(fh):
                by_kind.setdefault(rec["kind"], []).append(ShapEntry(
                    feature_id=rec["feature_id"], dimension=rec["dimension"],
                    mean_abs=float(rec["mean_abs_shap"]), rank=int(rec["rank"])))
        for entries in by_kind.values():
            entries.sort(key=lambda e: e.rank)
        return cls(by_kind=by_kind)


_DIMENSION_OF = {spec.id: spec.dimension for spec in FEATURE_REGISTRY}


def sample_background(train: Dataset, size: int, seed: int) -> tuple[np.ndarray, list[str]]:
    """Background rows for the estimator plus their ids for the lineage audit."""
    if train.n <= size:
        return train.X.copy(), list(train.ids)
    rng = child_rng(seed, "shap-background")
    idx = np.sort(rng.choice(train.n, size=size, replace=False))
    return train.X[idx].copy(), [train.ids[i] for i in idx]


def shap_ranking(models_by_kind: dict[str, list], rows: Dataset,
                 background: np.ndarray, m: int, seed: int) -> ShapReport:
    """Mean |phi| per feature over all rows and all fold models, ranked.

    Attribution RNG derives from (seed, kind, model index, row id): row order
    and any parallel scheduling cannot change results.
    """
    by_kind = {}
    for kind, models in models_by_kind.items():
        acc = np.zeros(len(FEATURE_IDS))
        for model_i, model in enumerate(models):
            for r in range(rows.n):
                phi = shapley_sample(model, rows.X[r], background, m, seed,
                                     kind, model_i, rows.ids[r])
                acc += np.abs(phi)
        mean_abs = acc / (len(models) * rows.n)
        order = np.lexsort((np.arange(len(FEATURE_IDS)), -mean_abs))
        entries = [ShapEntry(feature_id=FEATURE_IDS[j],
                             dimension=_DIMENSION_OF[FEATURE_IDS[j]],
                             mean_abs=float(mean_abs[j]), rank=rank + 1)
                   for rank, j in enumerate(order)]
        by_kind[kind] = entries
    return ShapReport(by_kind=by_kind)
