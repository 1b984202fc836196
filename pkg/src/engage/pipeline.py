"""Feature registry, per-transcript extraction, and dataset assembly.

The 42-slot registry freezes feature order; every serialization (CSV, model
artifacts, reports) refers to features by this order. Missing values are
NaN in memory and empty cells in CSV, never sentinel numbers.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .backends import EmbeddingModelId
from .corpus import Transcript, merge_same_speaker_runs, split_sentences
from .errors import DuplicateSessionId, EngageError, UnlabeledRow
from .features import (conv_features, load_default_bank, question_features,
                       semantic_features, sentiment_features)

DIM_CONV = "Conv"
DIM_SEM = "Sem"
DIM_SENT = "Sent"
DIM_QUES = "Ques"


@dataclass(frozen=True)
class FeatureSpec:
    id: str
    name: str
    dimension: str


def _semantic_specs() -> list[FeatureSpec]:
    specs = []
    blocks = [("F19", "promcse"), ("F27", "sbert"), ("F35", "sakil")]
    stats = ("mean", "sd", "skew", "kurt")
    for start, model in blocks:
        base = int(start[1:])
        for offset, (mode, stat) in enumerate(
                [(m, s) for m in ("all", "adj") for s in stats]):
            specs.append(FeatureSpec(f"F{base + offset:02d}",
                                     f"{model}_{mode}_cosine_{stat}", DIM_SEM))
    return specs


FEATURE_REGISTRY: tuple[FeatureSpec, ...] = tuple(sorted([
    FeatureSpec("F01", "therapist_words_per_turn_mean", DIM_CONV),
    FeatureSpec("F02", "client_words_per_turn_mean", DIM_CONV),
    FeatureSpec("F03", "client_therapist_word_ratio", DIM_CONV),
    FeatureSpec("F04", "client_questions_per_turn", DIM_QUES),
    FeatureSpec("F05", "therapist_questions_per_turn", DIM_QUES),
    FeatureSpec("F06", "client_therapist_question_ratio", DIM_QUES),
    FeatureSpec("F07", "client_turn_count", DIM_CONV),
    FeatureSpec("F08", "therapist_turn_count", DIM_CONV),
    FeatureSpec("F09", "client_therapist_turn_ratio", DIM_CONV),
    FeatureSpec("F10", "mean_turn_duration_s", DIM_CONV),
    FeatureSpec("F11", "client_sentiment_weighted_mean", DIM_SENT),
    FeatureSpec("F12", "client_sentiment_change_count", DIM_SENT),
    FeatureSpec("F13", "therapist_words_per_turn_sd", DIM_CONV),
    FeatureSpec("F14", "therapist_words_per_turn_skew", DIM_CONV),
    FeatureSpec("F15", "therapist_words_per_turn_kurt", DIM_CONV),
    FeatureSpec("F16", "client_words_per_turn_sd", DIM_CONV),
    FeatureSpec("F17", "client_words_per_turn_skew", DIM_CONV),
    FeatureSpec("F18", "client_words_per_turn_kurt", DIM_CONV),
    *_semantic_specs(),
], key=lambda s: s.id))

FEATURE_IDS: tuple[str, ...] = tuple(s.id for s in FEATURE_REGISTRY)
_ID_TO_COL = {fid: i for i, fid in enumerate(FEATURE_IDS)}
N_FEATURES = 42


def _check_registry():
    assert len(FEATURE_REGISTRY) == N_FEATURES
    assert FEATURE_IDS == tuple(f"F{i:02d}" for i in range(1, N_FEATURES + 1))
    counts = {}
    for s in FEATURE_REGISTRY:
        counts[s.dimension] = counts.get(s.dimension, 0) + 1
    assert counts == {DIM_CONV: 13, DIM_SEM: 24, DIM_SENT: 2, DIM_QUES: 3}, counts


_check_registry()

LABELS = ("LO", "HI")  # index = numeric encoding; HI is the positive class
POSITIVE_LABEL = "HI"


def encode_label(label: str) -> int:
    try:
        return LABELS.index(label)
    except ValueError:
        raise UnlabeledRow(f"label must be HI or LO, got {label!r}")


@dataclass(frozen=True)
class FeatureVector:
    session_id: str
    values: np.ndarray  # 42 floats, NaN where missing
    label: str | None = None

    def __post_init__(self):
        if self.values.shape != (N_FEATURES,):
            raise ValueError(f"feature vector must have {N_FEATURES} slots")


@dataclass
class Dataset:
    """Rectangular feature matrix with aligned ids and labels (HI=1, LO=0)."""
    ids: list[str]
    X: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        assert self.X.shape == (len(self.ids), N_FEATURES)
        assert self.y.shape == (len(self.ids),)

    @property
    def n(self) -> int:
        return len(self.ids)

    def class_counts(self) -> dict[str, int]:
        return {"HI": int(np.sum(self.y == 1)), "LO": int(np.sum(self.y == 0))}

    def subset(self, idx) -> "Dataset":
        idx = np.asarray(idx, dtype=np.intp)
        return Dataset(ids=[self.ids[i] for i in idx], X=self.X[idx].copy(),
                       y=self.y[idx].copy())

    def copy(self) -> "Dataset":
        return Dataset(ids=list(self.ids), X=self.X.copy(), y=self.y.copy())


@dataclass(frozen=True)
class MissingSummary:
    rows: int
    feature_cells: int
    total_cells: int  # includes id and label columns
    missing_cells: int
    per_feature: dict[str, int]

    @property
    def missing_rate(self) -> float:
        return self.missing_cells / self.feature_cells if self.feature_cells else 0.0


def extract_features(t: Transcript, backend,
                     model_ids: tuple[EmbeddingModelId, ...] | None = None,
                     word_bank=None) -> FeatureVector:
    """Run all four extractors over a transcript and fill the 42 slots.

    ``model_ids`` assigns embedding models to the three semantic block slots
    (PromCSE, SBERT, SAKIL order); None means offline hashing for all three.
    """
    if model_ids is None:
        model_ids = (EmbeddingModelId.HASHING_OFFLINE,) * 3
    if word_bank is None:
        word_bank = load_default_bank()
    merged = merge_same_speaker_runs(t)
    slots: dict[str, float] = {}
    try:
        slots.update(conv_features(merged))
        slots.update(question_features(merged, word_bank))
        slots.update(sentiment_features(merged, backend))
        slots.update(semantic_features(split_sentences(merged), backend, model_ids))
    except EngageError as e:
        raise type(e)(f"session {t.session_id}: {e}") from e
    values = np.full(N_FEATURES, np.nan)
    for fid, val in slots.items():
        values[_ID_TO_COL[fid]] = val
    return FeatureVector(session_id=t.session_id, values=values, label=t.label)


def build_dataset(vectors: list[FeatureVector]) -> tuple[Dataset, MissingSummary]:
    """Assemble labeled vectors into a pre-imputation Dataset plus a missing-value summary."""
    if not vectors:
        raise ValueError("need at least one feature vector")
    seen = set()
    for v in vectors:
        if v.label is None:
            raise UnlabeledRow(f"session {v.session_id} has no label")
        if v.session_id in seen:
            raise DuplicateSessionId(v.session_id)
        seen.add(v.session_id)
    X = np.stack([v.values for v in vectors])
    y = np.array([encode_label(v.label) for v in vectors], dtype=np.int8)
    ds = Dataset(ids=[v.session_id for v in vectors], X=X, y=y)
    missing_mask = np.isnan(X)
    per_feature = {fid: int(missing_mask[:, i].sum()) for i, fid in enumerate(FEATURE_IDS)}
    summary = MissingSummary(
        rows=ds.n,
        feature_cells=ds.n * N_FEATURES,
        total_cells=ds.n * (N_FEATURES + 2),
        missing_cells=int(missing_mask.sum()),
        per_feature=per_feature,
    )
    return ds, summary


# -- feature CSV (header: session_id,label,F01..F42; empty cell = missing) --

def _fmt(x: float) -> str:
    return "" if np.isnan(x) else repr(float(x))


def write_feature_csv(path, ds: Dataset):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["session_id", "label", *FEATURE_IDS])
        for i in range(ds.n):
            w.writerow([ds.ids[i], LABELS[ds.y[i]], *(_fmt(v) for v in ds.X[i])])


def write_vectors_csv(path, vectors: list[FeatureVector]):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["session_id", "label", *FEATURE_IDS])
        for v in vectors:
            w.writerow([v.session_id, v.label or "", *(_fmt(x) for x in v.values)])


def read_feature_csv(path) -> Dataset:
    with open(path, encoding="utf-8", newline="") as fh:
        return _read_feature_rows(fh)


def read_feature_csv_text(text: str) -> Dataset:
    return _read_feature_rows(io.StringIO(text))


def _read_feature_rows(fh) -> Dataset:
    r = csv.reader(fh)
    header = next(r, None)
    expected = ["session_id", "label", *FEATURE_IDS]
    if header is None or header[:len(expected)] != expected:
        raise ValueError("feature CSV header does not match the registry order")
    ids, labels, rows = [], [], []
    for rec in r:
        if not rec:
            continue
        ids.append(rec[0])
        labels.append(rec[1])
        rows.append([float(c) if c != "" else np.nan for c in rec[2:2 + N_FEATURES]])
    if not ids:
        raise ValueError("feature CSV has no rows")
    y = np.array([encode_label(l) for l in labels], dtype=np.int8)
    return Dataset(ids=ids, X=np.asarray(rows), y=y)
