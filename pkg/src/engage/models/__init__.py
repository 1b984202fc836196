"""Classifier families: random forest, gradient-boosted trees, kernel SVM."""

from .boosting import GradientBoosting, fit_gbt
from .forest import RandomForest, fit_rf
from .params import (DEFAULT_GRIDS, GBTParams, RFParams, SVMParams, enumerate_grid,
                     params_from_dict)
from .serialize import load_model, model_from_dict, model_to_dict, save_model
from .svm import KernelSVM, fit_svm
from .tree import DecisionTree

KINDS = ("rf", "gbt", "svm")

FIT_BY_KIND = {"rf": fit_rf, "gbt": fit_gbt, "svm": fit_svm}

__all__ = [
    "DecisionTree", "RandomForest", "GradientBoosting", "KernelSVM",
    "fit_rf", "fit_gbt", "fit_svm", "FIT_BY_KIND", "KINDS",
    "RFParams", "GBTParams", "SVMParams", "DEFAULT_GRIDS", "enumerate_grid",
    "params_from_dict", "model_to_dict", "model_from_dict", "save_model", "load_model",
]
