"""Command-line entry points: extract, run, synth, report."""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .backends import EmbeddingCache, EmbeddingModelId, OfflineBackend, ServiceBackend
from .config import load_config
from .corpus import parse_transcript
from .errors import EngageError
from .evaluate import evaluate_protocol, pearson_matrix, tune_fold_models
from .explain import sample_background, shap_ranking
from .lineage import Lineage, audit_lineage
from .pipeline import (FEATURE_IDS, Dataset, extract_features, read_feature_csv,
                       write_feature_csv, write_vectors_csv)
from .preprocess import (SplitSpec, balanced_holdout_split, feature_means,
                         impute_means, minmax_apply, minmax_fit, remove_outliers,
                         save_preprocess_params)
from .resample import SmoteLineage, VariantSpec, kde_curve, make_variant
from .report import render_report
from .synth import generate_corpus

SERVICE_MODEL_IDS = (EmbeddingModelId.PROMCSE, EmbeddingModelId.SBERT,
                     EmbeddingModelId.SAKIL)
OFFLINE_MODEL_IDS = (EmbeddingModelId.HASHING_OFFLINE,) * 3


def _make_backend(cfg: dict, corpus_dir: Path | None):
    if cfg["backend"] == "offline":
        return OfflineBackend(), OFFLINE_MODEL_IDS
    cache_path = cfg.get("embedding_cache")
    if cache_path is None and corpus_dir is not None:
        cache_path = corpus_dir / "embedding_cache.jsonl"
    cache = EmbeddingCache(cache_path) if cache_path else None
    backend = ServiceBackend(cfg["service_url"], cache=cache,
                             retry_base_delay=cfg["retry_base_delay"])
    return backend, SERVICE_MODEL_IDS


# -- extract -------------------------------------------------------------------

def cmd_extract(args) -> int:
    cfg = load_config(args.config, {"backend": args.backend, "seed": args.seed})
    corpus_dir = Path(args.corpus)
    files = sorted([*corpus_dir.glob("*.json"), *corpus_dir.glob("*.csv")])
    if not files:
        print(f"no transcript files under {corpus_dir}", file=sys.stderr)
        return 2
    backend, model_ids = _make_backend(cfg, corpus_dir)
    vectors, failures = [], []
    for path in files:
        fmt = "JSON" if path.suffix == ".json" else "CSV"
        try:
            transcript = parse_transcript(path.read_bytes(), fmt)
            vectors.append(extract_features(transcript, backend, model_ids))
        except EngageError as e:
            failures.append((path.name, f"{type(e).__name__}: {e}"))
    out_csv = Path(args.out)
    out_csv.parent.mkdir(parents=True, exist_ok=True)
    write_vectors_csv(out_csv, vectors)

    n = len(vectors)
    missing_by_feature = {
        fid: int(sum(np.isnan(v.values[i]) for v in vectors))
        for i, fid in enumerate(FEATURE_IDS)
    }
    missing_cells = sum(missing_by_feature.values())
    summary = {
        "rows": n,
        "feature_cells": n * len(FEATURE_IDS),
        "total_cells": n * (len(FEATURE_IDS) + 2),
        "missing_cells": missing_cells,
        "missing_rate": missing_cells / (n * len(FEATURE_IDS)) if n else 0.0,
        "per_feature": missing_by_feature,
        "failures": [{"file": f, "error": e} for f, e in failures],
    }
    summary_path = out_csv.with_suffix(".missing.json")
    with open(summary_path, "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=1, sort_keys=True)
    print(f"extracted {n} transcripts -> {out_csv} "
          f"(missing cells: {missing_cells}, rate {summary['missing_rate']:.4%})")
    for name, err in failures:
        print(f"FAILED {name}: {err}", file=sys.stderr)
    return 2 if failures else 0


# -- run -----------------------------------------------------------------------

def _write_pearson(out_dir: Path, matrix: np.ndarray, pairs):
    with open(out_dir / "pearson_matrix.csv", "w", encoding="utf-8", newline="") as fh:
        fh.write("feature_id," + ",".join(FEATURE_IDS) + "\n")
        for i, fid in enumerate(FEATURE_IDS):
            cells = ["" if np.isnan(v) else repr(float(v)) for v in matrix[i]]
            fh.write(fid + "," + ",".join(cells) + "\n")
    with open(out_dir / "pearson_pairs.csv", "w", encoding="utf-8", newline="") as fh:
        fh.write("feature_a,feature_b,r\n")
        for a, b, r in pairs:
            fh.write(f"{a},{b},{r!r}\n")


def _write_kde(out_dir: Path, name: str, ds: Dataset, grid_points: int):
    kde_dir = out_dir / "kde"
    kde_dir.mkdir(exist_ok=True)
    with open(kde_dir / f"{name}.csv", "w", encoding="utf-8", newline="") as fh:
        fh.write("variant,feature_id,x,density\n")
        for i, fid in enumerate(FEATURE_IDS):
            col = ds.X[:, i]
            if col.std() == 0.0 or len(col) < 2:
                continue  # no spread, no density curve
            for x, d in kde_curve(col, grid_points):
                fh.write(f"{name},{fid},{x!r},{d!r}\n")


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def cmd_run(args) -> int:
    cfg = load_config(args.config, {"backend": args.backend, "seed": args.seed})
    seed = cfg["seed"]
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    features_path = Path(args.features)
    lineage = Lineage()
    current_stage = "init"

    def stage(name):
        nonlocal current_stage
        current_stage = name
        print(f"[run] {name}")

    try:
        stage("load features")
        raw = read_feature_csv(features_path)

        stage("impute")
        imputed = impute_means(raw)
        lineage.imputation_stats_ids = list(raw.ids)

        stage("outlier removal")
        kept, removed = remove_outliers(imputed, cfg["contamination"], seed)

        stage("holdout split")
        train_raw, holdout_raw = balanced_holdout_split(
            kept, SplitSpec(cfg["holdout_per_class"], seed))
        lineage.holdout_ids = list(holdout_raw.ids)

        stage("normalize")
        params = minmax_fit(train_raw)
        lineage.normalization_fit_ids = list(train_raw.ids)
        train = minmax_apply(train_raw, params)
        holdout = minmax_apply(holdout_raw, params)
        save_preprocess_params(out_dir / "preprocess_params.json",
                               feature_means(train_raw), params)

        stage("variants")
        counts = train.class_counts()
        majority = max(counts.values())
        variants = []
        variants_dir = out_dir / "variants"
        variants_dir.mkdir(exist_ok=True)
        variant_manifest = []
        for vcfg in cfg["variants"]:
            if vcfg["kind"] == "downsample":
                spec = VariantSpec(vcfg["name"], "downsample", min(counts.values()))
            else:
                target = majority if vcfg.get("target") == "majority" \
                    else int(vcfg["target"])
                spec = VariantSpec(vcfg["name"], "smote_tomek", max(target, majority))
            smote_lineage = SmoteLineage()
            ds = make_variant(train, spec, seed=seed, smote_k=cfg["smote_k"],
                              lineage=smote_lineage)
            variants.append((spec.name, ds))
            lineage.variants[spec.name] = {
                "row_ids": [i for i in ds.ids if not i.startswith("syn:")],
                "smote_parent_ids": sorted(smote_lineage.origin_ids()),
            }
            write_feature_csv(variants_dir / f"{spec.name}.csv", ds)
            variant_manifest.append({
                "name": spec.name, "kind": spec.kind,
                "treatment": "random downsample" if spec.kind == "downsample"
                else "smote, tomek majority removal, smote top-up",
                "path": f"variants/{spec.name}.csv",
                "class_counts": ds.class_counts(),
            })
        with open(variants_dir / "manifest.json", "w", encoding="utf-8") as fh:
            json.dump(variant_manifest, fh, indent=1, sort_keys=True)

        stage("evaluate")
        grids = cfg["grids"]
        kinds = tuple(cfg["kinds"])
        report = evaluate_protocol(variants, holdout, kinds, grids, seed)
        for cell in report.cells:
            for fold in cell.folds:
                key = f"{cell.arm}/{cell.kind}/{fold.fold}"
                lineage.fold_train_ids[key] = fold.train_ids
        report.write_csv(out_dir / "eval_report.csv")
        report.write_json(out_dir / "eval_report.json")

        stage("correlations")
        matrix, pairs = pearson_matrix(kept)
        _write_pearson(out_dir, matrix, pairs)

        stage("kde curves")
        _write_kde(out_dir, "train", train, cfg["kde_grid_points"])
        for name, ds in variants:
            _write_kde(out_dir, name, ds, cfg["kde_grid_points"])

        stage("shap models")
        shap_cfg = cfg["shap"]
        models_by_kind = {}
        for kind in kinds:
            cell = tune_fold_models(train, kind, grids[kind], seed,
                                    holdout=None, arm="train_unaugmented")
            models_by_kind[kind] = [f.model for f in cell.folds]
            for fold in cell.folds:
                key = f"train_unaugmented/{kind}/{fold.fold}"
                lineage.fold_train_ids[key] = fold.train_ids

        stage("shap attribution")
        background, bg_ids = sample_background(train, shap_cfg["background_size"],
                                               seed)
        lineage.shap_background_ids = bg_ids
        rows = train
        if shap_cfg.get("max_rows") and train.n > shap_cfg["max_rows"]:
            from .rng import child_rng
            idx = np.sort(child_rng(seed, "shap-rows").choice(
                train.n, size=shap_cfg["max_rows"], replace=False))
            rows = train.subset(idx)
        shap_report = shap_ranking(models_by_kind, rows, background,
                                   shap_cfg["m"], seed)
        shap_report.write_csv(out_dir / "shap_report.csv")

        stage("counts, lineage, manifest")
        counts_doc = {
            "input": raw.class_counts(),
            "outliers_removed": removed.n,
            "post_outlier": kept.class_counts(),
            "holdout": holdout.class_counts(),
            "train": train.class_counts(),
            "variants": {name: ds.class_counts() for name, ds in variants},
        }
        with open(out_dir / "counts.json", "w", encoding="utf-8") as fh:
            json.dump(counts_doc, fh, indent=1, sort_keys=True)
        lineage.write(out_dir / "lineage.json")
        violations = audit_lineage(lineage)
        if violations:
            print("LEAKAGE AUDIT FAILED:", file=sys.stderr)
            for v in violations:
                print(f"  {v}", file=sys.stderr)
            return 1

        outputs = sorted(p for p in out_dir.rglob("*")
                         if p.is_file() and p.name != "manifest.json")
        manifest = {
            "version": __version__,
            "config": cfg,
            "inputs": {str(features_path.name): _sha256(features_path)},
            "outputs": {str(p.relative_to(out_dir)): _sha256(p) for p in outputs},
            "stages": ["impute", "outlier_removal", "holdout_split", "normalize",
                       "variants", "evaluate", "correlations", "kde", "shap"],
        }
        with open(out_dir / "manifest.json", "w", encoding="utf-8") as fh:
            json.dump(manifest, fh, indent=1, sort_keys=True)
    except EngageError as e:
        print(f"run failed at stage '{current_stage}': {type(e).__name__}: {e}",
              file=sys.stderr)
        return 1
    print(f"run complete -> {out_dir}")
    return 0


# -- synth / report ---------------------------------------------------------------

def cmd_synth(args) -> int:
    if args.n_hi < 10 or args.n_lo < 10:
        print("need at least 10 transcripts per class", file=sys.stderr)
        return 1
    paths = generate_corpus(args.n_hi, args.n_lo, args.seed, args.out)
    print(f"wrote {len(paths)} transcripts to {args.out}")
    return 0


def cmd_report(args) -> int:
    text = render_report(args.run_dir)
    out = Path(args.out) if args.out else Path(args.run_dir) / "report.md"
    out.write_text(text, encoding="utf-8")
    print(f"report -> {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="engage",
        description="Engagement-quality classification for counseling transcripts")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="extract feature vectors from transcripts")
    p.add_argument("--corpus", required=True, help="directory of transcript files")
    p.add_argument("--out", required=True, help="output feature CSV")
    p.add_argument("--config", default=None)
    p.add_argument("--backend", choices=["service", "offline"], default=None)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("run", help="preprocess, resample, train, evaluate, explain")
    p.add_argument("--features", required=True, help="labeled feature CSV")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--config", default=None)
    p.add_argument("--backend", choices=["service", "offline"], default=None)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("synth", help="generate a synthetic labeled corpus")
    p.add_argument("--n-hi", type=int, required=True)
    p.add_argument("--n-lo", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=42)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("report", help="render run outputs as Markdown tables")
    p.add_argument("--run-dir", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
