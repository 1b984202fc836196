"""Model backends behind the wire protocol.

Checkpoints are configuration, never hardcoded: each model id resolves to a
backend spec. The ``hash`` and ``lexicon`` types are deterministic and fully
offline; the transformer types lazy-load heavyweight checkpoints and report
503 until they are available.
"""

from __future__ import annotations

import hashlib
import math
import threading


class ModelNotLoaded(Exception):
    pass


class HashEmbedder:
    """Keyed feature-hashing embedder over word uni/bigrams; offline stand-in."""

    def __init__(self, dim: int, key: str):
        self.dim = dim
        self.key = key.encode("utf-8")

    def embed(self, sentences: list[str]) -> list[list[float]]:
        out = []
        for s in sentences:
            tokens = s.lower().split()
            ngrams = tokens + [f"{a} {b}" for a, b in zip(tokens, tokens[1:])]
            v = [0.0] * self.dim
            for g in ngrams:
                digest = hashlib.blake2b(g.encode("utf-8"), digest_size=8,
                                         key=self.key).digest()
                h = int.from_bytes(digest, "big")
                v[h % self.dim] += -1.0 if (h >> 63) & 1 else 1.0
            norm = math.sqrt(sum(x * x for x in v))
            if norm == 0.0:
                v[0] = 1.0
                norm = 1.0
            out.append([x / norm for x in v])
        return out


class SentenceTransformerEmbedder:
    """Wraps a sentence-transformers checkpoint; loads on first use."""

    def __init__(self, checkpoint: str, dim: int | None = None):
        self.checkpoint = checkpoint
        self._dim = dim
        self._model = None
        self._lock = threading.Lock()
        self._failed = None

    def _load(self):
        with self._lock:
            if self._model is None and self._failed is None:
                try:
                    from sentence_transformers import SentenceTransformer
                    self._model = SentenceTransformer(self.checkpoint)
                    self._dim = self._model.get_sentence_embedding_dimension()
                except Exception as e:  # noqa: BLE001 - report as 503
                    self._failed = e
        if self._failed is not None:
            raise ModelNotLoaded(f"{self.checkpoint}: {self._failed}")

    @property
    def dim(self) -> int:
        if self._dim is None:
            self._load()
        return self._dim

    def embed(self, sentences: list[str]) -> list[list[float]]:
        self._load()
        vectors = self._model.encode(sentences, convert_to_numpy=True)
        return [v.tolist() for v in vectors]


_POSITIVE = frozenset("""
good great love loved wonderful amazing happy hope hopeful better best calm
proud glad excellent awesome fantastic nice enjoy enjoyed helpful supportive
confident grateful thankful relieved excited improving improved progress
""".split())

_NEGATIVE = frozenset("""
bad sad angry hate hated awful terrible worse worst anxious afraid scared
tired hopeless stressed worried upset hurt lonely miserable depressed
frustrated annoyed guilty ashamed exhausted stuck pointless
""".split())


class LexiconSentiment:
    """Word-list polarity scorer; offline stand-in for the transformer model."""

    def score(self, texts: list[str]) -> tuple[list[int], list[float]]:
        labels, confidences = [], []
        for t in texts:
            tokens = [w.strip(".,!?;:'\"()") for w in t.lower().split()]
            pos = sum(w in _POSITIVE for w in tokens)
            neg = sum(w in _NEGATIVE for w in tokens)
            if pos > neg:
                label = 3
            elif neg > pos:
                label = 1
            else:
                label = 2
            labels.append(label)
            confidences.append(max(0.34, abs(pos - neg) / (pos + neg + 1)))
        return labels, confidences


class TransformerSentiment:
    """Three-way sentiment checkpoint mapped to labels 1/2/3."""

    def __init__(self, checkpoint: str):
        self.checkpoint = checkpoint
        self._pipe = None
        self._lock = threading.Lock()
        self._failed = None

    def _load(self):
        with self._lock:
            if self._pipe is None and self._failed is None:
                try:
                    from transformers import pipeline
                    self._pipe = pipeline("sentiment-analysis",
                                          model=self.checkpoint, top_k=None)
                except Exception as e:  # noqa: BLE001
                    self._failed = e
        if self._failed is not None:
            raise ModelNotLoaded(f"{self.checkpoint}: {self._failed}")

    def score(self, texts: list[str]) -> tuple[list[int], list[float]]:
        self._load()
        order = {"negative": 1, "neutral": 2, "positive": 3,
                 "label_0": 1, "label_1": 2, "label_2": 3}
        labels, confidences = [], []
        for result in self._pipe(texts):
            best = max(result, key=lambda r: r["score"])
            labels.append(order[best["label"].lower()])
            confidences.append(float(best["score"]))
        return labels, confidences


def build_embedder(spec: dict):
    if spec["type"] == "hash":
        return HashEmbedder(dim=spec["dim"], key=spec.get("key", "model-service")), \
            spec["dim"]
    if spec["type"] == "sentence-transformers":
        embedder = SentenceTransformerEmbedder(spec["checkpoint"], spec.get("dim"))
        return embedder, spec.get("dim")
    raise ValueError(f"unknown embedder type {spec['type']!r}")


def build_sentiment(spec: dict):
    if spec["type"] == "lexicon":
        return LexiconSentiment()
    if spec["type"] == "transformer":
        return TransformerSentiment(spec["checkpoint"])
    raise ValueError(f"unknown sentiment type {spec['type']!r}")
