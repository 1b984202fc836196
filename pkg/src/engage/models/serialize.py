"""Self-describing JSON artifacts for trained models."""

from __future__ import annotations

import json

import numpy as np

from .boosting import GradientBoosting
from .forest import RandomForest
from .params import params_from_dict
from .svm import KernelSVM
from .tree import DecisionTree

FORMAT_VERSION = 1


def model_to_dict(model) -> dict:
    base = {
        "format_version": FORMAT_VERSION,
        "kind": model.kind,
        "params": model.params.to_dict(),
        "seed": model.seed,
        "n_features": model.n_features,
    }
    if model.kind == "rf":
        base["trees"] = [t.to_arrays() for t in model.trees]
    elif model.kind == "gbt":
        base["f0"] = model.f0
        base["trees"] = [t.to_arrays() for t in model.trees]
    elif model.kind == "svm":
        base["sv_X"] = model.sv_X.tolist()
        base["sv_coef"] = model.sv_coef.tolist()
        base["bias"] = model.bias
        base["gamma_value"] = model.gamma_value
        base["platt_a"] = model.platt_a
        base["platt_b"] = model.platt_b
        base["kkt_residual"] = model.kkt_residual
    else:
        raise ValueError(f"unknown model kind {model.kind!r}")
    return base


def model_from_dict(doc: dict):
    if doc.get("format_version") != FORMAT_VERSION:
        raise ValueError(f"unsupported model format {doc.get('format_version')!r}")
    kind = doc["kind"]
    params = params_from_dict(kind, doc["params"])
    nf = doc["n_features"]
    if kind == "rf":
        trees = [DecisionTree.from_arrays(t, nf) for t in doc["trees"]]
        return RandomForest(params=params, seed=doc["seed"], trees=trees, n_features=nf)
    if kind == "gbt":
        trees = [DecisionTree.from_arrays(t, nf) for t in doc["trees"]]
        return GradientBoosting(params=params, seed=doc["seed"], f0=doc["f0"],
                                trees=trees, n_features=nf)
    if kind == "svm":
        return KernelSVM(params=params, seed=doc["seed"],
                         sv_X=np.asarray(doc["sv_X"], dtype=np.float64),
                         sv_coef=np.asarray(doc["sv_coef"], dtype=np.float64),
                         bias=doc["bias"], gamma_value=doc["gamma_value"],
                         platt_a=doc["platt_a"], platt_b=doc["platt_b"],
                         kkt_residual=doc["kkt_residual"], n_features=nf)
    raise ValueError(f"unknown model kind {kind!r}")


def save_model(path, model):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(model), fh)


def load_model(path):
    with open(path, encoding="utf-8") as fh:
        return model_from_dict(json.load(fh))
