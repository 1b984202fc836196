"""Hyperparameter types and the default tuning grids."""

from __future__ import annotations

from dataclasses import asdict, dataclass


@dataclass(frozen=True)
class RFParams:
    n_estimators: int
    max_depth: int
    min_samples_split: int
    min_samples_leaf: int

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class GBTParams:
    iterations: int
    depth: int
    learning_rate: float

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class SVMParams:
    C: float
    kernel: str                      # linear | rbf | poly | sigmoid
    gamma: float | str | None = None  # number, "scale", "auto"; None for linear

    def to_dict(self):
        return asdict(self)


DEFAULT_GRIDS = {
    "rf": {
        "n_estimators": [50, 100, 200, 500],
        "max_depth": [10, 15, 20, 30],
        "min_samples_split": [2, 5, 10, 20],
        "min_samples_leaf": [1, 2, 4, 8],
    },
    "gbt": {
        "iterations": [200, 500, 750],
        "depth": [4, 6, 8],
        "learning_rate": [0.01, 0.05, 0.1],
    },
    "svm": {
        "C": [0.01, 0.1, 1, 10, 100],
        "kernel": ["linear", "rbf", "poly", "sigmoid"],
        "gamma": [0.01, 0.1, 1, "scale", "auto"],
    },
}


def enumerate_grid(kind: str, grid: dict) -> list:
    """All configurations in canonical (declared) order.

    The SVM grid is deduplicated: gamma does not affect the linear kernel, so
    each C contributes one linear configuration instead of one per gamma.
    """
    if kind == "rf":
        return [RFParams(n, d, s, l)
                for n in grid["n_estimators"]
                for d in grid["max_depth"]
                for s in grid["min_samples_split"]
                for l in grid["min_samples_leaf"]]
    if kind == "gbt":
        return [GBTParams(i, d, lr)
                for i in grid["iterations"]
                for d in grid["depth"]
                for lr in grid["learning_rate"]]
    if kind == "svm":
        configs = []
        for c in grid["C"]:
            for kernel in grid["kernel"]:
                if kernel == "linear":
                    configs.append(SVMParams(C=c, kernel="linear", gamma=None))
                else:
                    configs.extend(SVMParams(C=c, kernel=kernel, gamma=g)
                                   for g in grid["gamma"])
        return configs
    raise ValueError(f"unknown classifier kind {kind!r}")


def params_from_dict(kind: str, d: dict):
    cls = {"rf": RFParams, "gbt": GBTParams, "svm": SVMParams}[kind]
    return cls(**d)
