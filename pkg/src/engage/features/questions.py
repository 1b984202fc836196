"""Rule-based question detection and the question-rate features F04-F06.

Auto-captioned transcripts use question marks inconsistently, so a sentence
also counts as a question when any adjacent token pair combines a question
word with an auxiliary verb (either order).
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources

from ..corpus import Speaker, Transcript, split_sentences


@dataclass(frozen=True)
class WordBank:
    question_words: frozenset[str]
    auxiliary_verbs: frozenset[str]

    def __post_init__(self):
        if not self.question_words or not self.auxiliary_verbs:
            raise ValueError("word bank lists must be non-empty")


def _read_bank_file(name: str) -> frozenset[str]:
    text = resources.files("engage").joinpath("data", name).read_text("utf-8")
    tokens = set()
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            tokens.add(line.lower())
    return frozenset(tokens)


def load_default_bank() -> WordBank:
    return WordBank(
        question_words=_read_bank_file("question_words.txt"),
        auxiliary_verbs=_read_bank_file("auxiliary_verbs.txt"),
    )


def is_question(sentence: str, bank: WordBank) -> bool:
    """True on a question mark or a question-word/auxiliary-verb bigram."""
    if "?" in sentence:
        return True
    tokens = sentence.lower().split()
    for w1, w2 in zip(tokens, tokens[1:]):
        if (w1 in bank.question_words and w2 in bank.auxiliary_verbs) or \
           (w1 in bank.auxiliary_verbs and w2 in bank.question_words):
            return True
    return False


def question_features(t: Transcript, bank: WordBank) -> dict[str, float]:
    """F04/F05 (questions per turn by speaker) and F06 (client/therapist ratio).

    Each sentence counts at most once. F04/F05 are absent when the speaker
    has no turns; F06 is absent when the therapist asked no questions.
    """
    turn_counts = {Speaker.CLIENT: 0, Speaker.THERAPIST: 0}
    question_counts = {Speaker.CLIENT: 0, Speaker.THERAPIST: 0}
    for turn in t.turns:
        turn_counts[turn.speaker] += 1
    for sentence in split_sentences(t):
        if is_question(sentence.text, bank):
            question_counts[sentence.speaker] += 1

    out: dict[str, float] = {}
    if turn_counts[Speaker.CLIENT]:
        out["F04"] = question_counts[Speaker.CLIENT] / turn_counts[Speaker.CLIENT]
    if turn_counts[Speaker.THERAPIST]:
        out["F05"] = question_counts[Speaker.THERAPIST] / turn_counts[Speaker.THERAPIST]
    if question_counts[Speaker.THERAPIST]:
        out["F06"] = question_counts[Speaker.CLIENT] / question_counts[Speaker.THERAPIST]
    return out
