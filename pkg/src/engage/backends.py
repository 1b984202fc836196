"""Embedding and sentiment backends.

Two implementations of one interface: a deterministic offline backend
(feature-hashing embeddings plus a lexicon sentiment scorer) and an HTTP
client for the model service. Feature extraction code only sees
``embed_batch`` / ``sentiment_batch``.
"""

from __future__ import annotations

import enum
import hashlib
import json
import string
import threading
import time
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np
import requests

from .errors import BackendUnavailable, DimensionMismatch, EmptySentence

HASHING_DIM = 256
# Published constant keying the 64-bit n-gram hash; changing it changes
# every offline embedding, so it is part of the feature definition.
HASHING_KEY = b"engage.hashing.v1"


class EmbeddingModelId(enum.Enum):
    SAKIL = "sakil"
    PROMCSE = "promcse"
    SBERT = "sbert"
    HASHING_OFFLINE = "hashing-offline"


@dataclass(frozen=True)
class Embedding:
    values: np.ndarray
    model: EmbeddingModelId

    def __post_init__(self):
        if not np.all(np.isfinite(self.values)):
            raise ValueError("embedding has non-finite entries")


@dataclass(frozen=True)
class SentimentScore:
    label: int  # 1 negative, 2 neutral, 3 positive
    confidence: float

    def __post_init__(self):
        if self.label not in (1, 2, 3):
            raise ValueError(f"sentiment label {self.label} outside {{1,2,3}}")
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence {self.confidence} outside [0,1]")


def _hash64(ngram: str) -> int:
    digest = hashlib.blake2b(ngram.encode("utf-8"), digest_size=8, key=HASHING_KEY).digest()
    return int.from_bytes(digest, "big")


def hashing_embed(sentence: str, dim: int = HASHING_DIM) -> Embedding:
    """Deterministic signed feature-hashing embedding of word uni/bigrams.

    Lowercases, hashes each n-gram with a keyed 64-bit hash, accumulates
    +/-1 per occurrence (sign from bit 63, bucket from hash mod dim), then
    L2-normalizes. Identical text yields an identical vector on any platform.
    """
    tokens = sentence.lower().split()
    if not tokens:
        raise EmptySentence("cannot embed empty sentence")
    ngrams = list(tokens)
    ngrams.extend(f"{a} {b}" for a, b in zip(tokens, tokens[1:]))
    v = np.zeros(dim)
    for g in ngrams:
        h = _hash64(g)
        v[h % dim] += -1.0 if (h >> 63) & 1 else 1.0
    norm = float(np.linalg.norm(v))
    if norm == 0.0:  # all contributions cancelled; pin a deterministic bucket
        v[_hash64(ngrams[0]) % dim] = 1.0
        norm = 1.0
    return Embedding(values=v / norm, model=EmbeddingModelId.HASHING_OFFLINE)


def _load_wordlist(name: str) -> frozenset[str]:
    text = resources.files("engage").joinpath("data", name).read_text("utf-8")
    words = set()
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            words.add(line.lower())
    return frozenset(words)


_POSITIVE_WORDS = _load_wordlist("lexicon_positive.txt")
_NEGATIVE_WORDS = _load_wordlist("lexicon_negative.txt")


def lexicon_sentiment(text: str) -> SentimentScore:
    """Polarity from bundled word lists; neutral with confidence 0.34 on no hits."""
    tokens = [t.strip(string.punctuation) for t in text.lower().split()]
    tokens = [t for t in tokens if t]
    if not tokens:
        raise EmptySentence("cannot score empty text")
    pos = sum(t in _POSITIVE_WORDS for t in tokens)
    neg = sum(t in _NEGATIVE_WORDS for t in tokens)
    if pos > neg:
        label = 3
    elif neg > pos:
        label = 1
    else:
        label = 2
    confidence = max(0.34, abs(pos - neg) / (pos + neg + 1))
    return SentimentScore(label=label, confidence=confidence)


def _check_texts(texts: list[str]):
    if not texts:
        raise ValueError("batch must hold at least one text")
    for t in texts:
        if not t or not t.strip():
            raise EmptySentence("batch contains an empty text")


class OfflineBackend:
    """Pure, deterministic backend; serves any embedding model id by hashing."""

    def embedding_dim(self, model: EmbeddingModelId) -> int:
        return HASHING_DIM

    def embed_batch(self, model: EmbeddingModelId, sentences: list[str]) -> list[Embedding]:
        _check_texts(sentences)
        return [hashing_embed(s) for s in sentences]

    def sentiment_batch(self, texts: list[str]) -> list[SentimentScore]:
        _check_texts(texts)
        return [lexicon_sentiment(t) for t in texts]


class EmbeddingCache:
    """Append-only JSONL cache keyed by (model id, sha256 of sentence text)."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._entries: dict[tuple[str, str], list[float]] = {}
        if self.path.exists():
            with open(self.path, encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    rec = json.loads(line)
                    self._entries[(rec["model"], rec["sha256"])] = rec["values"]

    @staticmethod
    def text_key(text: str) -> str:
        return hashlib.sha256(text.encode("utf-8")).hexdigest()

    def get(self, model: str, text: str) -> list[float] | None:
        return self._entries.get((model, self.text_key(text)))

    def put(self, model: str, text: str, values: list[float]):
        key = self.text_key(text)
        with self._lock:
            if (model, key) in self._entries:
                return
            self._entries[(model, key)] = values
            rec = {"model": model, "sha256": key, "dim": len(values), "values": values}
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(rec) + "\n")


class ServiceBackend:
    """HTTP client to the model service, with retries and an embedding cache.

    Retries are bounded (3 attempts, exponential backoff capped at 10 s) and
    end in BackendUnavailable; there is no silent fallback to the offline
    backend. ``request_count`` counts actual HTTP calls so cache behaviour is
    observable.
    """

    MAX_BATCH = 256

    def __init__(self, base_url: str, cache: EmbeddingCache | None = None,
                 max_in_flight: int = 4, retry_base_delay: float = 0.5,
                 timeout: float = 60.0):
        self.base_url = base_url.rstrip("/")
        self.cache = cache
        self.retry_base_delay = retry_base_delay
        self.timeout = timeout
        self.request_count = 0
        self._sem = threading.Semaphore(max_in_flight)
        self._count_lock = threading.Lock()
        self._dims: dict[str, int] | None = None

    def _post(self, path: str, payload: dict) -> dict:
        return self._request("POST", path, payload)

    def _request(self, method: str, path: str, payload: dict | None = None) -> dict:
        url = f"{self.base_url}{path}"
        last_err: Exception | None = None
        for attempt in range(3):
            if attempt:
                time.sleep(min(self.retry_base_delay * 2 ** (attempt - 1), 10.0))
            try:
                with self._sem:
                    with self._count_lock:
                        self.request_count += 1
                    resp = requests.request(method, url, json=payload, timeout=self.timeout)
                resp.raise_for_status()
                return resp.json()
            except (requests.ConnectionError, requests.Timeout) as e:
                last_err = e
            except requests.HTTPError as e:
                status = e.response.status_code if e.response is not None else None
                if status is not None and 400 <= status < 500:
                    raise  # client errors will not heal on retry
                last_err = e
        raise BackendUnavailable(f"{url} unreachable after 3 attempts: {last_err}")

    def info(self) -> dict:
        return self._request("GET", "/v1/info")

    def embedding_dim(self, model: EmbeddingModelId) -> int:
        if self._dims is None:
            info = self.info()
            self._dims = {mid: entry["dim"] for mid, entry in info["models"].items()}
        try:
            return self._dims[model.value]
        except KeyError:
            raise DimensionMismatch(f"service does not declare model {model.value!r}")

    def embed_batch(self, model: EmbeddingModelId, sentences: list[str]) -> list[Embedding]:
        _check_texts(sentences)
        dim = self.embedding_dim(model)
        vectors: list[list[float] | None] = [None] * len(sentences)
        misses: list[int] = []
        for i, s in enumerate(sentences):
            cached = self.cache.get(model.value, s) if self.cache else None
            if cached is not None:
                vectors[i] = cached
            else:
                misses.append(i)
        for chunk_start in range(0, len(misses), self.MAX_BATCH):
            chunk = misses[chunk_start:chunk_start + self.MAX_BATCH]
            payload = {"model": model.value, "sentences": [sentences[i] for i in chunk]}
            reply = self._post("/v1/embed", payload)
            if reply["dim"] != dim or any(len(v) != dim for v in reply["vectors"]):
                raise DimensionMismatch(
                    f"service returned dim {reply['dim']} for {model.value}, expected {dim}")
            for i, vec in zip(chunk, reply["vectors"]):
                vectors[i] = vec
                if self.cache:
                    self.cache.put(model.value, sentences[i], vec)
        return [Embedding(values=np.asarray(v, dtype=float), model=model) for v in vectors]

    def sentiment_batch(self, texts: list[str]) -> list[SentimentScore]:
        _check_texts(texts)
        scores: list[SentimentScore] = []
        for chunk_start in range(0, len(texts), self.MAX_BATCH):
            chunk = texts[chunk_start:chunk_start + self.MAX_BATCH]
            reply = self._post("/v1/sentiment", {"texts": chunk})
            scores.extend(SentimentScore(label=int(l), confidence=float(c))
                          for l, c in zip(reply["labels"], reply["confidences"]))
        if len(scores) != len(texts):
            raise BackendUnavailable("sentiment reply length mismatch")
        return scores
