"""Engagement-quality classification for counseling-session transcripts.

A batch pipeline: parse diarized transcripts, extract 42 interpretable NLP
features (conversational dynamics, semantic similarity, sentiment, question
detection), preprocess and resample the tabular dataset, train three
classifier families, and report metrics plus Shapley feature rankings.
"""

__version__ = "0.1.0"
