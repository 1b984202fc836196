"""Feature extractors for the four analytical dimensions."""

from .conversational import MomentStats, conv_features, moment_stats
from .questions import WordBank, is_question, load_default_bank, question_features
from .semantic import (SimilaritySet, adjacent_similarities, all_pairs_similarities,
                       cosine, semantic_features)
from .sentiment import sentiment_changes, sentiment_features, weighted_sentiment

__all__ = [
    "MomentStats", "moment_stats", "conv_features",
    "SimilaritySet", "cosine", "all_pairs_similarities", "adjacent_similarities",
    "semantic_features",
    "weighted_sentiment", "sentiment_changes", "sentiment_features",
    "WordBank", "is_question", "load_default_bank", "question_features",
]
