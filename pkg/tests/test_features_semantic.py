import itertools
import math

import numpy as np
import pytest

from engage.backends import Embedding, EmbeddingModelId, OfflineBackend, hashing_embed
from engage.corpus import Sentence, Speaker
from engage.errors import TooFewSentences, ZeroVector
from engage.features import (adjacent_similarities, all_pairs_similarities, cosine,
                             semantic_features)

HASH = EmbeddingModelId.HASHING_OFFLINE


def emb(*vals):
    return Embedding(values=np.asarray(vals, dtype=float), model=HASH)


def brute_force_cosine(a, b):
    dot = sum(x * y for x, y in zip(a, b))
    na = math.sqrt(sum(x * x for x in a))
    nb = math.sqrt(sum(y * y for y in b))
    return dot / (na * nb)


class TestCosine:
    def test_orthogonal(self):
        assert cosine(emb(1, 0), emb(0, 1)) == 0.0

    def test_colinear(self):
        assert cosine(emb(1, 1), emb(2, 2)) == pytest.approx(1.0)

    def test_hand_value(self):
        assert cosine(emb(1, 2), emb(3, 4)) == pytest.approx(11 / (math.sqrt(5) * 5))

    def test_zero_vector_rejected(self):
        with pytest.raises(ZeroVector):
            cosine(emb(0, 0), emb(1, 0))

    def test_clamped_to_unit_interval(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            a, b = rng.normal(size=6), rng.normal(size=6)
            v = cosine(emb(*a), emb(*b))
            assert -1.0 <= v <= 1.0


class TestSimilaritySets:
    def test_all_pairs_count(self):
        es = [emb(*v) for v in np.random.default_rng(1).normal(size=(4, 3))]
        assert len(all_pairs_similarities(es).values) == 6

    def test_identical_embeddings_all_ones(self):
        es = [emb(1, 2, 3)] * 5
        assert np.allclose(all_pairs_similarities(es).values, 1.0)

    def test_matches_bruteforce_oracle(self):
        rng = np.random.default_rng(2)
        for _ in range(50):
            n = int(rng.integers(2, 9))
            vecs = rng.normal(size=(n, 5))
            es = [emb(*v) for v in vecs]
            got = all_pairs_similarities(es).values
            expected = [brute_force_cosine(vecs[i], vecs[j])
                        for i, j in itertools.combinations(range(n), 2)]
            assert np.allclose(got, expected, atol=1e-12)
            assert len(got) == n * (n - 1) // 2

    def test_adjacent_counts_and_slice(self):
        rng = np.random.default_rng(3)
        vecs = rng.normal(size=(6, 4))
        es = [emb(*v) for v in vecs]
        adj = adjacent_similarities(es).values
        assert len(adj) == 5
        # adjacent set is the (i, i+1) slice of the all-pairs set
        full = all_pairs_similarities(es).values
        pairs = list(itertools.combinations(range(6), 2))
        superdiag = [full[pairs.index((i, i + 1))] for i in range(5)]
        assert np.allclose(adj, superdiag)

    def test_alternating_orthogonal(self):
        es = [emb(1, 0), emb(0, 1), emb(1, 0), emb(0, 1), emb(1, 0)]
        assert np.allclose(adjacent_similarities(es).values, 0.0)

    def test_too_few(self):
        with pytest.raises(TooFewSentences):
            all_pairs_similarities([emb(1, 0)])
        with pytest.raises(TooFewSentences):
            adjacent_similarities([emb(1, 0)])

    def test_permutation_keeps_all_pairs_mean(self):
        rng = np.random.default_rng(4)
        vecs = rng.normal(size=(7, 4))
        es = [emb(*v) for v in vecs]
        perm = rng.permutation(7)
        mean_a = all_pairs_similarities(es).values.mean()
        mean_b = all_pairs_similarities([es[i] for i in perm]).values.mean()
        assert mean_a == pytest.approx(mean_b, abs=1e-12)


def _sentences(texts):
    return [Sentence(text=t, turn_index=i, speaker=Speaker.CLIENT)
            for i, t in enumerate(texts)]


FIXTURE_TEXTS = [
    "I want to feel better about work.",
    "Work has been stressful lately.",
    "My manager keeps adding tasks.",
    "I want to feel better about work.",
    "Maybe I should talk to my manager.",
]


class TestSemanticFeatures:
    def test_single_sentence_all_missing(self):
        out = semantic_features(_sentences(["only one"]), OfflineBackend(),
                                (HASH, HASH, HASH))
        assert out == {}

    def test_identical_sentences(self):
        out = semantic_features(_sentences(["same thing here"] * 4), OfflineBackend(),
                                (HASH, HASH, HASH))
        assert out["F19"] == pytest.approx(1.0)
        assert out["F23"] == pytest.approx(1.0)
        assert out["F20"] == pytest.approx(0.0)
        assert "F21" not in out and "F22" not in out  # sd 0, undefined moments

    def test_fixture_matches_independent_bruteforce(self):
        """Recompute F19-F42 from raw hashing vectors with standalone loops."""
        out = semantic_features(_sentences(FIXTURE_TEXTS), OfflineBackend(),
                                (HASH, HASH, HASH))
        vecs = [hashing_embed(t).values.tolist() for t in FIXTURE_TEXTS]
        all_vals = [brute_force_cosine(vecs[i], vecs[j])
                    for i, j in itertools.combinations(range(5), 2)]
        adj_vals = [brute_force_cosine(vecs[i], vecs[i + 1]) for i in range(4)]

        def moments(xs):
            n = len(xs)
            mean = sum(xs) / n
            m2 = sum((x - mean) ** 2 for x in xs) / n
            m3 = sum((x - mean) ** 3 for x in xs) / n
            m4 = sum((x - mean) ** 4 for x in xs) / n
            return mean, math.sqrt(m2), m3 / m2 ** 1.5, m4 / m2 ** 2 - 3

        exp_all, exp_adj = moments(all_vals), moments(adj_vals)
        for block in ("F19", "F27", "F35"):  # all three blocks share the backend
            base = int(block[1:])
            for k in range(4):
                assert out[f"F{base + k:02d}"] == pytest.approx(exp_all[k], abs=1e-12)
                assert out[f"F{base + 4 + k:02d}"] == pytest.approx(exp_adj[k], abs=1e-12)
        assert len(out) == 24
