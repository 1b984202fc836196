"""Run configuration: one JSON file covering seeds, backends, preprocessing
constants, tuning grids, variant sizes, and attribution settings."""

from __future__ import annotations

import copy
import json
import os

from .models.params import DEFAULT_GRIDS

ENV_SERVICE_URL = "ENGAGE_MODEL_SERVICE_URL"

DEFAULT_CONFIG: dict = {
    "seed": 42,
    "backend": "offline",            # "offline" or "service"
    "service_url": "http://127.0.0.1:8077",
    "embedding_cache": None,          # path; extract derives one if null
    "retry_base_delay": 0.5,
    "contamination": 13 / 253,
    "holdout_per_class": 9,
    "smote_k": 5,
    "kinds": ["rf", "gbt", "svm"],
    "grids": DEFAULT_GRIDS,
    "variants": [
        {"name": "downsampled", "kind": "downsample"},
        {"name": "balanced_to_majority", "kind": "smote_tomek", "target": "majority"},
        {"name": "upsampled_200", "kind": "smote_tomek", "target": 200},
        {"name": "upsampled_300", "kind": "smote_tomek", "target": 300},
    ],
    "shap": {"m": 200, "background_size": 100, "max_rows": None},
    "kde_grid_points": 200,
}


def _merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for key, val in override.items():
        if isinstance(val, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], val)
        else:
            out[key] = copy.deepcopy(val)
    return out


def load_config(path: str | None = None, overrides: dict | None = None) -> dict:
    cfg = copy.deepcopy(DEFAULT_CONFIG)
    if path:
        with open(path, encoding="utf-8") as fh:
            cfg = _merge(cfg, json.load(fh))
    if overrides:
        cfg = _merge(cfg, {k: v for k, v in overrides.items() if v is not None})
    env_url = os.environ.get(ENV_SERVICE_URL)
    if env_url:
        cfg["service_url"] = env_url
    return cfg
