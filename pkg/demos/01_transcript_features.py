"""Walk one transcript through parsing, segmentation, and feature extraction.

Shows the raw-to-features path: speaker-run merging, sentence splitting,
and the 42-slot feature vector grouped by analytical dimension.
"""

import json

import numpy as np

from engage.backends import OfflineBackend
from engage.corpus import merge_same_speaker_runs, parse_transcript, split_sentences
from engage.pipeline import FEATURE_REGISTRY, extract_features

# A small diarized session; note the consecutive client fragments that the
# merge step will join into one turn.
raw = json.dumps({
    "session_id": "demo-001",
    "label": "HI",
    "turns": [
        {"speaker": "therapist", "text": "How has the week been for you?",
         "start_s": 0.0, "duration_s": 3.0},
        {"speaker": "client", "text": "Busy. Work kept piling up and",
         "start_s": 3.0, "duration_s": 2.5},
        {"speaker": "client", "text": "I barely slept on Tuesday.",
         "start_s": 5.5, "duration_s": 2.0},
        {"speaker": "therapist", "text": "That sounds exhausting. What helped?",
         "start_s": 7.5, "duration_s": 3.0},
        {"speaker": "client", "text": "A walk after dinner helped. I feel hopeful. "
                                      "What should I try next?",
         "start_s": 10.5, "duration_s": 4.0},
    ],
}).encode()

transcript = parse_transcript(raw, "JSON")
print(f"parsed {len(transcript.turns)} raw turns")

merged = merge_same_speaker_runs(transcript)
print(f"after merging same-speaker runs: {len(merged.turns)} turns")
for turn in merged.turns:
    print(f"  [{turn.speaker.value:9s}] {turn.text}")

sentences = split_sentences(merged)
print(f"\n{len(sentences)} sentences:")
for s in sentences:
    print(f"  (turn {s.turn_index}) {s.text}")

# The offline backend is deterministic: hashing embeddings + lexicon sentiment.
vector = extract_features(transcript, OfflineBackend())
print("\nfeature vector by dimension:")
for dimension in ("Conv", "Ques", "Sent", "Sem"):
    print(f"  -- {dimension}")
    for i, spec in enumerate(FEATURE_REGISTRY):
        if spec.dimension != dimension:
            continue
        value = vector.values[i]
        shown = "missing" if np.isnan(value) else f"{value:.4f}"
        print(f"  {spec.id}  {spec.name:32s} {shown}")
