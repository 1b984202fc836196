"""Client-sentiment features: confidence-weighted mean (F11) and change count (F12)."""

from __future__ import annotations

from ..backends import SentimentScore
from ..corpus import Speaker, Transcript
from ..errors import EmptyList


def weighted_sentiment(scores: list[SentimentScore]) -> float:
    """Confidence-weighted mean label; plain mean if all confidences are zero."""
    if not scores:
        raise EmptyList("weighted_sentiment over empty list")
    total_conf = sum(s.confidence for s in scores)
    if total_conf == 0.0:
        return sum(s.label for s in scores) / len(scores)
    return sum(s.label * s.confidence for s in scores) / total_conf


def sentiment_changes(labels: list[int]) -> int:
    """Number of positions where the label differs from its predecessor."""
    return sum(1 for a, b in zip(labels, labels[1:]) if a != b)


def sentiment_features(t: Transcript, backend) -> dict[str, float]:
    """F11/F12 over client turns only; both absent without client turns."""
    client_texts = [turn.text for turn in t.turns if turn.speaker is Speaker.CLIENT]
    if not client_texts:
        return {}
    scores = backend.sentiment_batch(client_texts)
    return {
        "F11": weighted_sentiment(scores),
        "F12": float(sentiment_changes([s.label for s in scores])),
    }
