import json

import numpy as np
import pytest

from engage.backends import OfflineBackend
from engage.cli import main
from engage.corpus import merge_same_speaker_runs, parse_transcript
from engage.lineage import Lineage, audit_lineage
from engage.pipeline import FEATURE_IDS, extract_features, read_feature_csv
from engage.synth import generate_corpus

from .stub_service import StubService

TINY_CONFIG = {
    "holdout_per_class": 4,
    "contamination": 0.05,
    "grids": {
        "rf": {"n_estimators": [10], "max_depth": [8], "min_samples_split": [2],
               "min_samples_leaf": [1]},
        "gbt": {"iterations": [15], "depth": [3], "learning_rate": [0.1]},
        "svm": {"C": [1], "kernel": ["linear"], "gamma": ["scale"]},
    },
    "variants": [
        {"name": "downsampled", "kind": "downsample"},
        {"name": "balanced_to_majority", "kind": "smote_tomek", "target": "majority"},
    ],
    "shap": {"m": 16, "background_size": 20, "max_rows": 10},
}


@pytest.fixture(scope="module")
def mini_run(tmp_path_factory):
    """One shared synth -> extract -> run for the read-only CLI tests."""
    tmp = tmp_path_factory.mktemp("mini")
    cfg_path = tmp / "config.json"
    cfg_path.write_text(json.dumps(TINY_CONFIG))
    assert main(["synth", "--n-hi", "16", "--n-lo", "16",
                 "--out", str(tmp / "corpus"), "--seed", "3"]) == 0
    assert main(["extract", "--corpus", str(tmp / "corpus"),
                 "--out", str(tmp / "features.csv"), "--backend", "offline"]) == 0
    assert main(["run", "--features", str(tmp / "features.csv"),
                 "--out", str(tmp / "run"), "--config", str(cfg_path),
                 "--seed", "9"]) == 0
    return tmp


class TestConfig:
    def test_env_var_overrides_service_url(self, tmp_path, monkeypatch):
        from engage.config import ENV_SERVICE_URL, load_config
        cfg_path = tmp_path / "c.json"
        cfg_path.write_text(json.dumps({"service_url": "http://from-file:1"}))
        monkeypatch.setenv(ENV_SERVICE_URL, "http://from-env:2")
        cfg = load_config(str(cfg_path))
        assert cfg["service_url"] == "http://from-env:2"

    def test_partial_file_merges_over_defaults(self, tmp_path):
        from engage.config import load_config
        cfg_path = tmp_path / "c.json"
        cfg_path.write_text(json.dumps({"shap": {"m": 7}}))
        cfg = load_config(str(cfg_path))
        assert cfg["shap"]["m"] == 7
        assert cfg["shap"]["background_size"] == 100  # default kept
        assert cfg["grids"]["rf"]["n_estimators"] == [50, 100, 200, 500]


class TestSynth:
    def test_file_counts_and_labels(self, tmp_path):
        paths = generate_corpus(12, 11, seed=0, out_dir=tmp_path)
        assert len(paths) == 23
        labels = []
        for p in paths:
            doc = json.loads(p.read_text())
            labels.append(doc["label"])
        assert labels.count("HI") == 12
        assert labels.count("LO") == 11

    def test_turn_ratio_ranges(self, tmp_path):
        paths = generate_corpus(25, 25, seed=1, out_dir=tmp_path)
        ratios = {"HI": [], "LO": []}
        for p in paths:
            t = merge_same_speaker_runs(parse_transcript(p.read_bytes(), "JSON"))
            v = extract_features(t, OfflineBackend())
            by_id = dict(zip(FEATURE_IDS, v.values))
            ratios[t.label].append(by_id["F09"])
        assert 0.8 <= np.mean(ratios["HI"]) <= 1.2
        assert 0.2 <= np.mean(ratios["LO"]) <= 0.6

    def test_client_word_contrast(self, tmp_path):
        paths = generate_corpus(15, 15, seed=2, out_dir=tmp_path)
        means = {"HI": [], "LO": []}
        for p in paths:
            t = parse_transcript(p.read_bytes(), "JSON")
            v = extract_features(t, OfflineBackend())
            means[t.label].append(dict(zip(FEATURE_IDS, v.values))["F02"])
        assert np.mean(means["LO"]) < 5.0
        assert np.mean(means["HI"]) > 2 * np.mean(means["LO"])

    def test_deterministic(self, tmp_path):
        a = generate_corpus(10, 10, seed=5, out_dir=tmp_path / "a")
        b = generate_corpus(10, 10, seed=5, out_dir=tmp_path / "b")
        for pa, pb in zip(a, b):
            assert pa.read_text() == pb.read_text()


class TestExtract:
    def test_malformed_file_exits_2_but_processes_rest(self, tmp_path):
        generate_corpus(6, 6, seed=0, out_dir=tmp_path / "corpus")
        (tmp_path / "corpus" / "bad.json").write_text("{broken")
        rc = main(["extract", "--corpus", str(tmp_path / "corpus"),
                   "--out", str(tmp_path / "features.csv"), "--backend", "offline"])
        assert rc == 2
        ds = read_feature_csv(tmp_path / "features.csv")
        assert ds.n == 12
        summary = json.loads(
            (tmp_path / "features.missing.json").read_text())
        assert len(summary["failures"]) == 1
        assert summary["failures"][0]["file"] == "bad.json"

    def test_missing_summary_counts(self, tmp_path):
        generate_corpus(8, 8, seed=1, out_dir=tmp_path / "corpus")
        main(["extract", "--corpus", str(tmp_path / "corpus"),
              "--out", str(tmp_path / "f.csv"), "--backend", "offline"])
        summary = json.loads((tmp_path / "f.missing.json").read_text())
        assert summary["rows"] == 16
        assert summary["feature_cells"] == 16 * 42
        assert summary["total_cells"] == 16 * 44
        assert sum(summary["per_feature"].values()) == summary["missing_cells"]

    def test_service_backend_with_warm_cache(self, tmp_path):
        generate_corpus(3, 3, seed=2, out_dir=tmp_path / "corpus")
        with StubService(dim=16) as stub:
            cfg = {"service_url": stub.url, "retry_base_delay": 0.01,
                   "embedding_cache": str(tmp_path / "cache.jsonl")}
            cfg_path = tmp_path / "cfg.json"
            cfg_path.write_text(json.dumps(cfg))
            args = ["extract", "--corpus", str(tmp_path / "corpus"),
                    "--out", str(tmp_path / "f.csv"), "--backend", "service",
                    "--config", str(cfg_path)]
            assert main(args) == 0
            calls_first = stub.embed_calls
            assert calls_first > 0
            assert main(args) == 0
            assert stub.embed_calls == calls_first  # warm cache: zero new calls


class TestRunFailure:
    def test_fail_fast_names_the_stage(self, tmp_path, capsys):
        # 6 rows per class cannot satisfy a 9-per-class holdout
        generate_corpus(6, 6, seed=0, out_dir=tmp_path / "corpus")
        main(["extract", "--corpus", str(tmp_path / "corpus"),
              "--out", str(tmp_path / "f.csv"), "--backend", "offline"])
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"holdout_per_class": 9, "contamination": 0.05}))
        rc = main(["run", "--features", str(tmp_path / "f.csv"),
                   "--out", str(tmp_path / "run"), "--config", str(cfg)])
        assert rc == 1
        err = capsys.readouterr().err
        assert "holdout split" in err
        assert "ClassTooSmall" in err


class TestRunOutputs:
    def test_expected_files(self, mini_run):
        run = mini_run / "run"
        for name in ("manifest.json", "counts.json", "eval_report.csv",
                     "eval_report.json", "shap_report.csv", "pearson_matrix.csv",
                     "pearson_pairs.csv", "lineage.json", "preprocess_params.json",
                     "variants/manifest.json", "kde/train.csv"):
            assert (run / name).exists(), name

    def test_counts_consistent(self, mini_run):
        counts = json.loads((mini_run / "run" / "counts.json").read_text())
        assert counts["input"] == {"HI": 16, "LO": 16}
        post = counts["post_outlier"]
        assert post["HI"] + post["LO"] == 32 - counts["outliers_removed"]
        assert counts["holdout"] == {"HI": 4, "LO": 4}
        for c in counts["variants"].values():
            assert c["HI"] == c["LO"]

    def test_lineage_audit_clean(self, mini_run):
        lineage = Lineage.read(mini_run / "run" / "lineage.json")
        assert audit_lineage(lineage) == []
        assert len(lineage.holdout_ids) == 8
        assert lineage.fold_train_ids  # populated for every cell

    def test_manifest_hashes_match_files(self, mini_run):
        import hashlib
        run = mini_run / "run"
        manifest = json.loads((run / "manifest.json").read_text())
        assert manifest["version"]
        for rel, digest in manifest["outputs"].items():
            actual = hashlib.sha256((run / rel).read_bytes()).hexdigest()
            assert actual == digest, rel

    def test_report_renders_table_layouts(self, mini_run):
        assert main(["report", "--run-dir", str(mini_run / "run")]) == 0
        text = (mini_run / "run" / "report.md").read_text()
        assert "| Stage | HI | LO | Total |" in text
        assert "| Dataset | Classifier | Acc | Pre | Rec | F1 | AUC " in text
        assert "| Rank | RF | Type | GBT | Type | SVM | Type |" in text
        assert "Strongly correlated feature pairs" in text

    def test_preprocess_params_schema(self, mini_run):
        params = json.loads(
            (mini_run / "run" / "preprocess_params.json").read_text())
        assert set(params) == set(FEATURE_IDS)
        for rec in params.values():
            assert set(rec) == {"mean", "min", "max"}
