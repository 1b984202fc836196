"""Transcript parsing, validation, and segmentation.

Input transcripts are diarized: an ordered list of speaker turns with
optional timing. Two serializations are supported, JSON and CSV (one
transcript per file in both cases).
"""

from __future__ import annotations

import csv
import enum
import io
import json
import re
from dataclasses import dataclass, field, replace

from .errors import EmptyTranscript, MalformedInput, UnknownSpeaker


class Speaker(enum.Enum):
    THERAPIST = "therapist"
    CLIENT = "client"


# Case-insensitive aliases accepted on input.
_SPEAKER_ALIASES = {
    "therapist": Speaker.THERAPIST,
    "counselor": Speaker.THERAPIST,
    "client": Speaker.CLIENT,
    "patient": Speaker.CLIENT,
}

# Sentence boundary: a run of terminal punctuation followed by whitespace.
# The terminator run stays with the left fragment ("Wait... really?!" gives
# two sentences). A trailing run without whitespace never splits.
_SENTENCE_BOUNDARY = re.compile(r"(?<=[.!?])\s+")


@dataclass(frozen=True)
class Turn:
    index: int
    speaker: Speaker
    text: str
    start_s: float | None = None
    duration_s: float | None = None

    def __post_init__(self):
        # Canonical form stores trimmed text so serialization round-trips.
        object.__setattr__(self, "text", self.text.strip())
        if not self.text:
            raise MalformedInput(f"turn {self.index}: empty text")
        if self.start_s is not None and self.start_s < 0:
            raise MalformedInput(f"turn {self.index}: negative start_s")
        if self.duration_s is not None and self.duration_s < 0:
            raise MalformedInput(f"turn {self.index}: negative duration_s")
        if self.start_s is not None and self.duration_s is not None and self.duration_s <= 0:
            raise MalformedInput(f"turn {self.index}: timed turn needs duration_s > 0")


@dataclass(frozen=True)
class Transcript:
    session_id: str
    turns: tuple[Turn, ...]
    label: str | None = None  # "HI", "LO", or None

    def __post_init__(self):
        if not self.turns:
            raise EmptyTranscript(f"{self.session_id}: no turns")
        for i, t in enumerate(self.turns):
            if t.index != i:
                raise MalformedInput(f"{self.session_id}: turn indices not contiguous")
        if self.label not in (None, "HI", "LO"):
            raise MalformedInput(f"{self.session_id}: bad label {self.label!r}")


@dataclass(frozen=True)
class Sentence:
    text: str
    turn_index: int
    speaker: Speaker


def _map_speaker(tag: str) -> Speaker:
    sp = _SPEAKER_ALIASES.get(str(tag).strip().lower())
    if sp is None:
        raise UnknownSpeaker(f"unmappable speaker tag {tag!r}")
    return sp


def _opt_float(value) -> float | None:
    if value is None or value == "":
        return None
    try:
        return float(value)
    except (TypeError, ValueError):
        raise MalformedInput(f"bad numeric field {value!r}")


def parse_transcript(raw: bytes, format: str) -> Transcript:
    """Parse a JSON or CSV byte stream into a validated Transcript.

    Unknown fields are ignored. Speaker tags are matched case-insensitively
    against the alias table (therapist/counselor, client/patient).
    """
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as e:
        raise MalformedInput(f"not valid UTF-8: {e}")
    if format == "JSON":
        return _parse_json(text)
    if format == "CSV":
        return _parse_csv(text)
    raise ValueError(f"unknown transcript format {format!r}")


def _parse_json(text: str) -> Transcript:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise MalformedInput(f"bad JSON: {e}")
    if not isinstance(doc, dict) or "session_id" not in doc or "turns" not in doc:
        raise MalformedInput("JSON transcript needs session_id and turns")
    raw_turns = doc["turns"]
    if not isinstance(raw_turns, list):
        raise MalformedInput("turns must be a list")
    if not raw_turns:
        raise EmptyTranscript(f"{doc.get('session_id')}: no turns")
    turns = []
    for i, rt in enumerate(raw_turns):
        if not isinstance(rt, dict) or "speaker" not in rt or "text" not in rt:
            raise MalformedInput(f"turn {i}: needs speaker and text")
        turns.append(Turn(
            index=i,
            speaker=_map_speaker(rt["speaker"]),
            text=str(rt["text"]).strip(),
            start_s=_opt_float(rt.get("start_s")),
            duration_s=_opt_float(rt.get("duration_s")),
        ))
    label = doc.get("label")
    return Transcript(session_id=str(doc["session_id"]), turns=tuple(turns),
                      label=None if label is None else str(label))


_CSV_COLUMNS = ["session_id", "label", "turn_index", "speaker", "text", "start_s", "duration_s"]


def _parse_csv(text: str) -> Transcript:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None or not set(_CSV_COLUMNS) <= set(reader.fieldnames):
        raise MalformedInput(f"CSV transcript needs columns {_CSV_COLUMNS}")
    rows = list(reader)
    if not rows:
        raise EmptyTranscript("CSV transcript has no rows")
    session_ids = {r["session_id"] for r in rows}
    if len(session_ids) != 1:
        raise MalformedInput("CSV transcript must hold exactly one session")
    labels = {r["label"] for r in rows}
    if len(labels) != 1:
        raise MalformedInput("label must be constant within a session")
    try:
        rows.sort(key=lambda r: int(r["turn_index"]))
    except ValueError:
        raise MalformedInput("turn_index must be an integer")
    turns = []
    for i, r in enumerate(rows):
        if int(r["turn_index"]) != i:
            raise MalformedInput("turn_index values not contiguous from 0")
        turns.append(Turn(
            index=i,
            speaker=_map_speaker(r["speaker"]),
            text=r["text"].strip(),
            start_s=_opt_float(r["start_s"]),
            duration_s=_opt_float(r["duration_s"]),
        ))
    label = rows[0]["label"] or None
    return Transcript(session_id=rows[0]["session_id"], turns=tuple(turns), label=label)


def serialize_transcript(t: Transcript) -> bytes:
    """JSON serialization; parse_transcript(serialize_transcript(t)) == t."""
    doc = {
        "session_id": t.session_id,
        "label": t.label,
        "turns": [
            {"speaker": turn.speaker.value, "text": turn.text,
             "start_s": turn.start_s, "duration_s": turn.duration_s}
            for turn in t.turns
        ],
    }
    return json.dumps(doc, ensure_ascii=False, indent=1).encode("utf-8")


def merge_same_speaker_runs(t: Transcript) -> Transcript:
    """Merge maximal consecutive same-speaker turns into single turns.

    Text fragments are joined with one space. Durations are summed when every
    turn in the run carries one, otherwise dropped. The merged turn keeps the
    first turn's start_s. Indices are reassigned contiguously.
    """
    merged: list[Turn] = []
    run: list[Turn] = []

    def flush():
        if not run:
            return
        text = " ".join(turn.text for turn in run)
        durations = [turn.duration_s for turn in run]
        duration = sum(durations) if all(d is not None for d in durations) else None
        start = run[0].start_s
        if start is not None and duration is not None and duration <= 0:
            duration = None  # zero-length timing carries no information
        merged.append(Turn(index=len(merged), speaker=run[0].speaker, text=text,
                           start_s=start, duration_s=duration))
        run.clear()

    for turn in t.turns:
        if run and turn.speaker != run[0].speaker:
            flush()
        run.append(turn)
    flush()
    return replace(t, turns=tuple(merged))


def split_sentences(t: Transcript) -> list[Sentence]:
    """Split each turn's text into sentences on terminal punctuation.

    A turn without terminal punctuation yields exactly one sentence. Empty
    fragments are discarded; global order follows (turn_index, position).
    """
    sentences: list[Sentence] = []
    for turn in t.turns:
        for frag in _SENTENCE_BOUNDARY.split(turn.text):
            frag = frag.strip()
            if frag:
                sentences.append(Sentence(text=frag, turn_index=turn.index,
                                          speaker=turn.speaker))
    return sentences


def word_count(text: str) -> int:
    """Number of whitespace-delimited tokens; contractions count as one."""
    return len(text.split())
