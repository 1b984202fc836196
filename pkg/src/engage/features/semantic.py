"""Semantic-similarity features from sentence embeddings.

Per embedding model, two similarity sets are reduced to moments: cosines of
all unordered sentence pairs and cosines of adjacent sentence pairs. Three
models times two sets times four moments gives F19-F42.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..backends import Embedding, EmbeddingModelId
from ..corpus import Sentence
from ..errors import DimensionMismatch, TooFewSentences, ZeroVector
from .conversational import moment_stats

# Block of four ids each for (all-pairs, adjacent) moments, per model slot.
SEMANTIC_BLOCKS: dict[EmbeddingModelId, tuple[str, ...]] = {
    EmbeddingModelId.PROMCSE: ("F19", "F20", "F21", "F22", "F23", "F24", "F25", "F26"),
    EmbeddingModelId.SBERT: ("F27", "F28", "F29", "F30", "F31", "F32", "F33", "F34"),
    EmbeddingModelId.SAKIL: ("F35", "F36", "F37", "F38", "F39", "F40", "F41", "F42"),
}


@dataclass(frozen=True)
class SimilaritySet:
    model: EmbeddingModelId
    mode: str  # "all_pairs" or "adjacent"
    values: np.ndarray


def cosine(x: Embedding, y: Embedding) -> float:
    """Cosine of two embeddings, clamped to [-1, 1] against rounding."""
    if x.model is not y.model or x.values.shape != y.values.shape:
        raise DimensionMismatch(f"cosine across {x.model}/{y.model} or differing dims")
    nx = float(np.linalg.norm(x.values))
    ny = float(np.linalg.norm(y.values))
    if nx == 0.0 or ny == 0.0:
        raise ZeroVector("cosine undefined for zero-norm embedding")
    return float(np.clip(np.dot(x.values, y.values) / (nx * ny), -1.0, 1.0))


def _normalized_matrix(es: list[Embedding]) -> np.ndarray:
    if len(es) < 2:
        raise TooFewSentences(f"need at least 2 embeddings, got {len(es)}")
    model = es[0].model
    dim = es[0].values.shape
    for e in es:
        if e.model is not model or e.values.shape != dim:
            raise DimensionMismatch("mixed models or dims in similarity set")
    m = np.stack([e.values for e in es])
    norms = np.linalg.norm(m, axis=1)
    if np.any(norms == 0.0):
        raise ZeroVector("zero-norm embedding in similarity set")
    return m / norms[:, None]


def all_pairs_similarities(es: list[Embedding]) -> SimilaritySet:
    """Cosines of every unordered pair i < j, in lexicographic (i, j) order."""
    r = _normalized_matrix(es)
    sims = np.clip(r @ r.T, -1.0, 1.0)
    iu, ju = np.triu_indices(len(es), k=1)
    return SimilaritySet(model=es[0].model, mode="all_pairs", values=sims[iu, ju])


def adjacent_similarities(es: list[Embedding]) -> SimilaritySet:
    """Cosines of consecutive pairs (i, i+1)."""
    r = _normalized_matrix(es)
    vals = np.clip(np.einsum("ij,ij->i", r[:-1], r[1:]), -1.0, 1.0)
    return SimilaritySet(model=es[0].model, mode="adjacent", values=vals)


def semantic_features(sentences: list[Sentence], backend,
                      model_ids: tuple[EmbeddingModelId, EmbeddingModelId, EmbeddingModelId],
                      ) -> dict[str, float]:
    """F19-F42 for one transcript.

    ``model_ids`` names the models serving the (PromCSE, SBERT, SAKIL) block
    slots in that order; with the offline backend all three are typically
    HASHING_OFFLINE. Fewer than two sentences leaves every slot absent.
    """
    out: dict[str, float] = {}
    if len(sentences) < 2:
        return out
    texts = [s.text for s in sentences]
    embedded: dict[EmbeddingModelId, list[Embedding]] = {}
    for mid in model_ids:
        if mid not in embedded:
            embedded[mid] = backend.embed_batch(mid, texts)

    slots = (EmbeddingModelId.PROMCSE, EmbeddingModelId.SBERT, EmbeddingModelId.SAKIL)
    for slot, mid in zip(slots, model_ids):
        ids = SEMANTIC_BLOCKS[slot]
        es = embedded[mid]
        for offset, sim_set in ((0, all_pairs_similarities(es)), (4, adjacent_similarities(es))):
            stats = moment_stats(sim_set.values)
            out[ids[offset + 0]] = stats.mean
            out[ids[offset + 1]] = stats.sd
            if stats.skew is not None:
                out[ids[offset + 2]] = stats.skew
            if stats.kurt is not None:
                out[ids[offset + 3]] = stats.kurt
    return out
