"""Conversational-dynamics features: turn counts, words per turn, timing.

Feature ids covered: F01-F03, F07-F10, F13-F18.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..corpus import Speaker, Transcript, word_count
from ..errors import EmptyList


@dataclass(frozen=True)
class MomentStats:
    """Population moments; skew/kurt are None when undefined."""
    mean: float
    sd: float
    skew: float | None
    kurt: float | None


def moment_stats(xs) -> MomentStats:
    """Mean, population sd, skewness m3/m2^1.5 and excess kurtosis m4/m2^2 - 3.

    Skewness needs at least 3 values, kurtosis at least 4, and both need
    nonzero variance; otherwise they come back as None.
    """
    a = np.asarray(xs, dtype=float)
    if a.size == 0:
        raise EmptyList("moment_stats over empty list")
    mean = float(a.mean())
    d = a - mean
    m2 = float(np.mean(d ** 2))
    sd = float(np.sqrt(m2))
    skew = kurt = None
    if m2 > 0.0:
        if a.size >= 3:
            skew = float(np.mean(d ** 3) / m2 ** 1.5)
        if a.size >= 4:
            kurt = float(np.mean(d ** 4) / m2 ** 2 - 3.0)
    return MomentStats(mean=mean, sd=sd, skew=skew, kurt=kurt)


def conv_features(t: Transcript) -> dict[str, float]:
    """Conversational-dynamics slots for a merged transcript.

    Per-speaker features are absent when that speaker has no turns; ratio
    features are absent when their denominator is absent. Values come back
    keyed by feature id; absent slots are simply not in the dict.
    """
    out: dict[str, float] = {}
    therapist = [word_count(turn.text) for turn in t.turns if turn.speaker is Speaker.THERAPIST]
    client = [word_count(turn.text) for turn in t.turns if turn.speaker is Speaker.CLIENT]

    def put_moments(counts, mean_id, sd_id, skew_id, kurt_id):
        stats = moment_stats(counts)
        out[mean_id] = stats.mean
        out[sd_id] = stats.sd
        if stats.skew is not None:
            out[skew_id] = stats.skew
        if stats.kurt is not None:
            out[kurt_id] = stats.kurt

    if therapist:
        put_moments(therapist, "F01", "F13", "F14", "F15")
        out["F08"] = float(len(therapist))
    if client:
        put_moments(client, "F02", "F16", "F17", "F18")
        out["F07"] = float(len(client))
    if therapist and client:
        out["F03"] = out["F02"] / out["F01"]  # client words over therapist words
        out["F09"] = out["F07"] / out["F08"]  # client turns over therapist turns

    timed = [turn.duration_s for turn in t.turns if turn.duration_s is not None]
    if timed:
        out["F10"] = float(np.mean(timed))
    return out
