"""Render a run directory's CSV/JSON outputs as Markdown tables."""

from __future__ import annotations

import csv
import json
from pathlib import Path

KIND_LABELS = {"rf": "RF", "gbt": "GBT", "svm": "SVM"}


def _pct(mean, sd) -> str:
    if mean is None:
        return "n/a"
    return f"{100 * mean:.1f}±{100 * sd:.1f}"


def _params_short(params: dict) -> str:
    return ", ".join(f"{k}: {v}" for k, v in sorted(params.items()))


def _counts_section(out: list[str], counts: dict):
    out.append("## Dataset counts\n")
    out.append("| Stage | HI | LO | Total |")
    out.append("| --- | ---: | ---: | ---: |")
    for stage in ("input", "post_outlier", "holdout", "train"):
        c = counts[stage]
        out.append(f"| {stage.replace('_', ' ')} | {c['HI']} | {c['LO']} "
                   f"| {c['HI'] + c['LO']} |")
    out.append("")
    out.append("## Balanced dataset variants\n")
    out.append("| Variant | HI | LO |")
    out.append("| --- | ---: | ---: |")
    for name, c in counts["variants"].items():
        out.append(f"| {name} | {c['HI']} | {c['LO']} |")
    out.append("")


def _grid_section(out: list[str], grids: dict):
    out.append("## Hyperparameter grids\n")
    out.append("| Classifier | Parameter | Values |")
    out.append("| --- | --- | --- |")
    for kind, grid in grids.items():
        for pname, values in grid.items():
            out.append(f"| {KIND_LABELS.get(kind, kind)} | {pname} | "
                       f"{json.dumps(values)} |")
    out.append("")


def _eval_section(out: list[str], eval_doc: dict):
    out.append("## Classifier performance on the holdout test set\n")
    out.append("Per cell: mean±sd in percent over the 5 fold models.\n")
    out.append("| Dataset | Classifier | Acc | Pre | Rec | F1 | AUC "
               "| Best parameters |")
    out.append("| --- | --- | --- | --- | --- | --- | --- | --- |")
    for cell in eval_doc["cells"]:
        agg = cell["aggregate"]
        row = [cell["arm"], KIND_LABELS.get(cell["kind"], cell["kind"])]
        for metric in ("accuracy", "precision", "recall", "f1", "auc"):
            m = agg[metric]
            row.append(_pct(m["mean"], m["sd"]))
        row.append(_params_short(cell["modal_params"]))
        out.append("| " + " | ".join(row) + " |")
    out.append("")


def _pearson_section(out: list[str], pairs: list[dict]):
    out.append("## Strongly correlated feature pairs (r > 0.75)\n")
    if not pairs:
        out.append("None found.\n")
        return
    out.append("| Feature A | Feature B | r |")
    out.append("| --- | --- | ---: |")
    for rec in pairs:
        out.append(f"| {rec['feature_a']} | {rec['feature_b']} "
                   f"| {float(rec['r']):.3f} |")
    out.append("")


def _shap_section(out: list[str], shap_rows: list[dict], kinds: list[str], top: int = 10):
    out.append(f"## Feature ranking by mean |Shapley value| (top {top})\n")
    by_kind: dict[str, dict[int, dict]] = {}
    for rec in shap_rows:
        by_kind.setdefault(rec["kind"], {})[int(rec["rank"])] = rec
    present = [k for k in kinds if k in by_kind]
    header = ["Rank"]
    for k in present:
        header.extend([KIND_LABELS.get(k, k), "Type"])
    out.append("| " + " | ".join(header) + " |")
    out.append("|" + " --- |" * len(header))
    for rank in range(1, top + 1):
        row = [str(rank)]
        for k in present:
            rec = by_kind[k].get(rank)
            row.extend([rec["feature_id"], rec["dimension"]] if rec else ["", ""])
        out.append("| " + " | ".join(row) + " |")
    out.append("")


def render_report(run_dir: str | Path) -> str:
    run_dir = Path(run_dir)
    out: list[str] = ["# Engagement classification run report\n"]

    with open(run_dir / "counts.json", encoding="utf-8") as fh:
        _counts_section(out, json.load(fh))
    with open(run_dir / "manifest.json", encoding="utf-8") as fh:
        manifest = json.load(fh)
    _grid_section(out, manifest["config"]["grids"])
    with open(run_dir / "eval_report.json", encoding="utf-8") as fh:
        _eval_section(out, json.load(fh))
    with open(run_dir / "pearson_pairs.csv", encoding="utf-8", newline="") as fh:
        _pearson_section(out, list(csv.DictReader(fh)))
    with open(run_dir / "shap_report.csv", encoding="utf-8", newline="") as fh:
        _shap_section(out, list(csv.DictReader(fh)), manifest["config"]["kinds"])

    out.append(f"Seed: {manifest['config']['seed']}; "
               f"package version {manifest['version']}.")
    out.append("")
    return "\n".join(out)
