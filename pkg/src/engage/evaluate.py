"""Evaluation protocol: stratified folds, per-fold grid search, holdout
metrics, and Pearson correlation analysis.

Per dataset arm and classifier kind, each of the 5 outer folds runs an inner
3-fold grid search on its training portion, refits the winner there, and
evaluates that model on the frozen holdout. Fold metrics are aggregated as
mean +/- population sd.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ClassSmallerThanK, SingleClassTruth
from .models import FIT_BY_KIND, enumerate_grid
from .pipeline import FEATURE_IDS, Dataset
from .rng import child_rng, child_seed_seq

METRIC_NAMES = ("accuracy", "precision", "recall", "f1", "auc")


def stratified_label_folds(y: np.ndarray, k: int, seed: int,
                           ) -> list[tuple[np.ndarray, np.ndarray]]:
    """Seeded stratified partition; per-class fold sizes differ by at most 1."""
    y = np.asarray(y)
    class_chunks = {}
    for cls in (0, 1):
        members = np.flatnonzero(y == cls)
        if members.size < k:
            raise ClassSmallerThanK(f"class {cls} has {members.size} rows < k={k}")
        rng = child_rng(seed, "kfold", cls)
        members = members[rng.permutation(members.size)]
        class_chunks[cls] = np.array_split(members, k)
    folds = []
    all_idx = np.arange(len(y))
    for i in range(k):
        val = np.sort(np.concatenate([class_chunks[0][i], class_chunks[1][i]]))
        train = np.setdiff1d(all_idx, val)
        folds.append((train, val))
    return folds


def stratified_kfold(ds: Dataset, k: int, seed: int) -> list[tuple[np.ndarray, np.ndarray]]:
    return stratified_label_folds(ds.y, k, seed)


# -- metrics -----------------------------------------------------------------

def auc_score(y_true: np.ndarray, y_score: np.ndarray) -> float:
    """AUC by the Mann-Whitney rank statistic with midrank tie correction."""
    y_true = np.asarray(y_true)
    y_score = np.asarray(y_score)
    n_pos = int(np.sum(y_true == 1))
    n_neg = int(np.sum(y_true == 0))
    if n_pos == 0 or n_neg == 0:
        raise SingleClassTruth("AUC needs both classes in y_true")
    order = np.argsort(y_score, kind="stable")
    ranks = np.empty(len(y_score))
    sorted_scores = y_score[order]
    i = 0
    while i < len(y_score):
        j = i
        while j + 1 < len(y_score) and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        ranks[order[i:j + 1]] = 0.5 * (i + j) + 1.0  # midrank, 1-based
        i = j + 1
    u = float(ranks[y_true == 1].sum()) - n_pos * (n_pos + 1) / 2.0
    return u / (n_pos * n_neg)


@dataclass(frozen=True)
class Metrics:
    accuracy: float
    precision: float
    recall: float
    f1: float
    auc: float | None
    flags: tuple[str, ...] = ()

    def as_dict(self) -> dict:
        return {"accuracy": self.accuracy, "precision": self.precision,
                "recall": self.recall, "f1": self.f1, "auc": self.auc,
                "flags": list(self.flags)}


def metrics(y_true, y_pred, y_score) -> Metrics:
    """Confusion-matrix metrics with HI (1) as the positive class."""
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    if len(y_true) == 0 or len(y_true) != len(y_pred):
        raise ValueError("y_true and y_pred must be non-empty and aligned")
    tp = int(np.sum((y_true == 1) & (y_pred == 1)))
    fp = int(np.sum((y_true == 0) & (y_pred == 1)))
    fn = int(np.sum((y_true == 1) & (y_pred == 0)))
    tn = int(np.sum((y_true == 0) & (y_pred == 0)))
    flags = []
    accuracy = (tp + tn) / len(y_true)
    if tp + fp == 0:
        precision = 0.0
        flags.append("no_positive_predictions")
    else:
        precision = tp / (tp + fp)
    if tp + fn == 0:
        recall = 0.0
        flags.append("no_positive_truth")
    else:
        recall = tp / (tp + fn)
    f1 = 0.0 if precision + recall == 0 else 2 * precision * recall / (precision + recall)
    try:
        auc = auc_score(y_true, np.asarray(y_score))
    except SingleClassTruth:
        auc = None
        flags.append("auc_undefined")
    return Metrics(accuracy=accuracy, precision=precision, recall=recall, f1=f1,
                   auc=auc, flags=tuple(flags))


# -- grid search ---------------------------------------------------------------

def _fit_seed(seed: int, *tags) -> int:
    return int(child_seed_seq(seed, *tags).generate_state(1)[0])


def grid_search_fold(X: np.ndarray, y: np.ndarray, kind: str, grid: dict,
                     seed: int, inner_k: int = 3):
    """Best config by mean inner-fold F1; ties by mean AUC, then grid order.

    A configuration whose fit raises scores 0 and is recorded, not raised.
    """
    configs = enumerate_grid(kind, grid)
    inner = stratified_label_folds(y, inner_k, _fit_seed(seed, "inner-split"))
    fit = FIT_BY_KIND[kind]
    best = None
    best_key = (-1.0, -1.0)
    n_errors = 0
    for ci, config in enumerate(configs):
        f1s, aucs = [], []
        failed = False
        for fi, (tr, val) in enumerate(inner):
            try:
                model = fit(X[tr], y[tr], config, _fit_seed(seed, "cfg", ci, fi))
            except Exception:
                failed = True
                break
            proba = model.predict_proba(X[val])
            m = metrics(y[val], (proba >= 0.5).astype(np.int8), proba)
            f1s.append(m.f1)
            aucs.append(m.auc if m.auc is not None else 0.0)
        if failed:
            n_errors += 1
            continue
        key = (float(np.mean(f1s)), float(np.mean(aucs)))
        if key > best_key:
            best_key = key
            best = config
    if best is None:
        raise RuntimeError(f"every {kind} configuration failed during grid search")
    return best, {"mean_f1": best_key[0], "mean_auc": best_key[1], "errors": n_errors}


# -- protocol -------------------------------------------------------------------

@dataclass
class FoldOutcome:
    fold: int
    best_params: dict
    metrics: Metrics
    model: object = field(repr=False, compare=False, default=None)
    train_ids: list[str] = field(default_factory=list)


@dataclass
class CellOutcome:
    arm: str
    kind: str
    folds: list[FoldOutcome]

    def aggregate(self) -> dict:
        out = {}
        for name in METRIC_NAMES:
            vals = [getattr(f.metrics, name) for f in self.folds]
            vals = [v for v in vals if v is not None]
            if vals:
                out[name] = {"mean": float(np.mean(vals)), "sd": float(np.std(vals))}
            else:
                out[name] = {"mean": None, "sd": None}
        return out

    def modal_params(self) -> dict:
        counts: dict[str, int] = {}
        for f in self.folds:
            key = json.dumps(f.best_params, sort_keys=True)
            counts[key] = counts.get(key, 0) + 1
        best = max(counts.items(), key=lambda kv: (kv[1], -self._first_index(kv[0])))
        return json.loads(best[0])

    def _first_index(self, key: str) -> int:
        for i, f in enumerate(self.folds):
            if json.dumps(f.best_params, sort_keys=True) == key:
                return i
        return len(self.folds)


@dataclass
class EvalReport:
    cells: list[CellOutcome]

    def to_json_dict(self) -> dict:
        return {
            "cells": [
                {
                    "arm": c.arm,
                    "kind": c.kind,
                    "aggregate": c.aggregate(),
                    "modal_params": c.modal_params(),
                    "folds": [
                        {"fold": f.fold, "best_params": f.best_params,
                         **f.metrics.as_dict()}
                        for f in c.folds
                    ],
                }
                for c in self.cells
            ]
        }

    def write_csv(self, path):
        with open(path, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh)
            header = ["arm", "classifier"]
            for name in METRIC_NAMES:
                header.extend([f"{name}_mean", f"{name}_sd"])
            header.append("best_params")
            w.writerow(header)
            for c in self.cells:
                agg = c.aggregate()
                row = [c.arm, c.kind]
                for name in METRIC_NAMES:
                    m = agg[name]
                    row.extend(["" if m["mean"] is None else repr(m["mean"]),
                                "" if m["sd"] is None else repr(m["sd"])])
                row.append(json.dumps(c.modal_params(), sort_keys=True))
                w.writerow(row)

    def write_json(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json_dict(), fh, indent=1, sort_keys=True)


def tune_fold_models(ds: Dataset, kind: str, grid: dict, seed: int,
                     holdout: Dataset | None = None, arm: str = "train",
                     n_folds: int = 5) -> CellOutcome:
    """Grid-search and refit one model per outer fold; score on holdout if given."""
    folds = stratified_kfold(ds, n_folds, _fit_seed(seed, "outer", arm, kind))
    fit = FIT_BY_KIND[kind]
    outcomes = []
    for fold_i, (tr, _val) in enumerate(folds):
        best, _stats = grid_search_fold(ds.X[tr], ds.y[tr], kind, grid,
                                        _fit_seed(seed, "grid", arm, kind, fold_i))
        model = fit(ds.X[tr], ds.y[tr], best,
                    _fit_seed(seed, "refit", arm, kind, fold_i))
        if holdout is not None:
            proba = model.predict_proba(holdout.X)
            m = metrics(holdout.y, (proba >= 0.5).astype(np.int8), proba)
        else:
            m = Metrics(np.nan, np.nan, np.nan, np.nan, None)
        outcomes.append(FoldOutcome(fold=fold_i, best_params=best.to_dict(),
                                    metrics=m, model=model,
                                    train_ids=[ds.ids[i] for i in tr]))
    return CellOutcome(arm=arm, kind=kind, folds=outcomes)


def evaluate_protocol(arms: list[tuple[str, Dataset]], holdout: Dataset,
                      kinds: tuple[str, ...], grids: dict, seed: int) -> EvalReport:
    """Full protocol over every (dataset arm, classifier kind) cell."""
    cells = []
    for arm_name, ds in arms:
        for kind in kinds:
            cells.append(tune_fold_models(ds, kind, grids[kind], seed,
                                          holdout=holdout, arm=arm_name))
    return EvalReport(cells=cells)


# -- correlation ------------------------------------------------------------------

def pearson_matrix(ds: Dataset, threshold: float = 0.75,
                   ) -> tuple[np.ndarray, list[tuple[str, str, float]]]:
    """42x42 Pearson matrix (NaN rows/cols for constant features, unit
    diagonal) plus all off-diagonal pairs with r above the threshold,
    strongest first."""
    X = ds.X
    if np.isnan(X).any():
        raise ValueError("correlation runs on the imputed dataset")
    centered = X - X.mean(axis=0)
    sd = X.std(axis=0)
    n = X.shape[1]
    with np.errstate(invalid="ignore", divide="ignore"):
        cov = centered.T @ centered / X.shape[0]
        denom = np.outer(sd, sd)
        r = np.where(denom > 0, cov / np.where(denom > 0, denom, 1.0), np.nan)
    np.fill_diagonal(r, 1.0)
    pairs = []
    for i in range(n):
        for j in range(i + 1, n):
            if not np.isnan(r[i, j]) and r[i, j] > threshold:
                pairs.append((FEATURE_IDS[i], FEATURE_IDS[j], float(r[i, j])))
    pairs.sort(key=lambda t: (-t[2], t[0], t[1]))
    return r, pairs
