"""Data-lineage recording and the holdout leakage audit.

The run records which original rows fed every fitted artifact; the audit
proves the holdout rows appear in none of them.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field


@dataclass
class Lineage:
    holdout_ids: list[str] = field(default_factory=list)
    normalization_fit_ids: list[str] = field(default_factory=list)
    imputation_stats_ids: list[str] = field(default_factory=list)
    shap_background_ids: list[str] = field(default_factory=list)
    # variant name -> {"row_ids": [...], "smote_parent_ids": [...]}
    variants: dict = field(default_factory=dict)
    # "arm/kind/fold" -> train row ids
    fold_train_ids: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "holdout_ids": self.holdout_ids,
            "normalization_fit_ids": self.normalization_fit_ids,
            "imputation_stats_ids": self.imputation_stats_ids,
            "shap_background_ids": self.shap_background_ids,
            "variants": self.variants,
            "fold_train_ids": self.fold_train_ids,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Lineage":
        return cls(**d)

    def write(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=1, sort_keys=True)

    @classmethod
    def read(cls, path) -> "Lineage":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def audit_lineage(lineage: Lineage) -> list[str]:
    """Return violations; an empty list means the holdout never leaked.

    Checks normalization fitting, every variant's retained rows and SMOTE
    parents, every fold's training rows, and the attribution background.
    The full-table imputation pass is intentionally not a violation (it runs
    before the split by design and is recorded for visibility).
    """
    holdout = set(lineage.holdout_ids)
    violations = []

    def check(name, ids):
        hits = holdout & set(ids)
        if hits:
            violations.append(f"{name}: {sorted(hits)}")

    check("normalization_fit", lineage.normalization_fit_ids)
    check("shap_background", lineage.shap_background_ids)
    for vname, rec in sorted(lineage.variants.items()):
        check(f"variant[{vname}].rows", rec["row_ids"])
        check(f"variant[{vname}].smote_parents", rec["smote_parent_ids"])
    for key, ids in sorted(lineage.fold_train_ids.items()):
        check(f"fold[{key}]", ids)
    return violations
