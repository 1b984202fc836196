"""Desk-scale synthetic corpus generator.

Produces labeled transcript files with the contrasts the real corpus is
reported to show: high-engagement sessions are long, balanced exchanges on
one coherent topic with client questions and sentiment that drifts upward;
low-engagement sessions are short therapist-dominated rounds with terse,
flat-to-negative client replies and topic churn.

Raw low-engagement files split therapist speech into caption-like fragments,
so same-speaker merging is exercised on every run.
"""

from __future__ import annotations

import json
from pathlib import Path

from .rng import child_rng

TOPIC_POOLS = {
    "work": [
        "Work has been piling up faster than I can clear it.",
        "My manager keeps moving the deadline on the main project.",
        "I stayed late at the office three times this week.",
        "The meetings at work leave no time for the actual work.",
        "I keep checking work email long after the workday ends.",
        "A coworker took credit for the report I wrote.",
        "The commute to the office drains me before work even starts.",
        "I want to ask my manager for a lighter project load.",
        "The new project at work could be a chance to show what I can do.",
        "I blocked two quiet hours for focused work this morning.",
        "Saying no to one extra task at work went better than expected.",
        "I left the office on time twice this week and it helped.",
    ],
    "smoking": [
        "I have smoked since college and it feels automatic now.",
        "The first cigarette with coffee is the hardest one to skip.",
        "I bought a pack yesterday even though I planned not to.",
        "Smoke breaks are the only pauses I take at work.",
        "My partner keeps finding cigarette packs in my jacket.",
        "The craving hits hardest when I drive past the corner store.",
        "I switched to chewing gum when the craving for a cigarette starts.",
        "Three days without a cigarette is my record this month.",
        "I put the cigarette money in a jar where I can see it.",
        "Skipping the smoke break felt strange but doable.",
        "The patch takes the edge off the morning craving.",
        "I told my brother I am quitting cigarettes for good this time.",
    ],
    "family": [
        "My sister and I argued again at the family dinner.",
        "Mom calls every day and the calls turn into lectures.",
        "The holidays with family always end in shouting.",
        "My father never asks how my life is actually going.",
        "Family expects me at every gathering no matter what.",
        "I skipped the family dinner on Sunday and felt guilty.",
        "I wrote my sister a letter instead of arguing with her.",
        "Dinner with my cousin went fine when we kept it short.",
        "Setting one boundary with mom actually held this week.",
        "My brother backed me up at the family gathering for once.",
        "We agreed to keep family visits to one hour for now.",
        "I told my family I need some weekends to myself.",
    ],
    "sleep": [
        "I lie in bed for hours before sleep comes.",
        "The alarm goes off and I have barely slept four hours.",
        "I scroll on my phone in bed until two in the morning.",
        "Waking up at three and staring at the ceiling is routine now.",
        "Bad sleep makes the whole next day feel underwater.",
        "I tried going to bed at the same time every night this week.",
        "Keeping the phone out of the bedroom helped me fall asleep.",
        "A short walk after dinner seems to make sleep come easier.",
        "I slept six hours straight on Tuesday for the first time in weeks.",
        "The breathing exercise before bed calms the racing thoughts.",
        "Cutting coffee after noon made the nights a little quieter.",
        "I wrote down my worries before bed and slept better.",
    ],
}

TOPIC_NAMES = tuple(TOPIC_POOLS)

THERAPIST_QUESTIONS = [
    "How did that make you feel?",
    "What do you think triggered it this time?",
    "When did you first notice this pattern?",
    "What would a better week look like for you?",
    "How would you like things to be different?",
    "What has helped you before in moments like that?",
    "Who could support you with this?",
    "What might be one small step you could take?",
]

THERAPIST_REFLECTIONS = [
    "It sounds like you have been carrying a lot lately.",
    "I hear how much effort you are already putting in.",
    "That sounds genuinely difficult to sit with.",
    "You noticed the pattern yourself, and that matters.",
    "It makes sense that you would feel that way.",
    "You are describing real progress, even if it feels small.",
    "Let us stay with that feeling for a moment.",
    "Thank you for being honest about how hard this is.",
]

CLIENT_QUESTIONS = [
    "What should I try when it gets hard again?",
    "How could I handle that better next time?",
    "Where should I even start with this?",
    "What would you suggest I do first?",
    "How do other people manage something like this?",
    "What can I do when the old habit pulls at me?",
]

CLIENT_NEGATIVE = [
    "I have been feeling anxious and worn down by it.",
    "Honestly it leaves me tired and discouraged.",
    "It has felt heavy and hopeless this month.",
    "I am stressed and worried it will never change.",
]

CLIENT_POSITIVE = [
    "I feel hopeful and a little proud of the progress.",
    "I am feeling calm and confident about the plan.",
    "It has been encouraging to see things improve.",
    "I feel supported and ready to keep going.",
]

CLIENT_ACKNOWLEDGE = [
    "Yes, that rings true.",
    "Right, that is fair.",
    "I had not seen it that way.",
]

LOW_EFFORT_REPLIES = [
    "yeah.",
    "i guess.",
    "maybe.",
    "okay.",
    "not really.",
    "i suppose so.",
    "i do not know.",
]

LOW_NEGATIVE_REPLIES = [
    "i am tired.",
    "it seems hopeless.",
    "i feel stuck.",
    "this feels pointless.",
]


def _timed(turns, rng, with_timing: bool):
    """Attach cumulative start/duration when the session carries timing."""
    out = []
    t = 0.0
    for speaker, text in turns:
        if with_timing:
            words = len(text.split())
            dur = round(0.32 * words + float(rng.uniform(0.3, 0.9)), 3)
            out.append({"speaker": speaker, "text": text, "start_s": round(t, 3),
                        "duration_s": dur})
            t += dur + round(float(rng.uniform(0.1, 0.6)), 3)
        else:
            out.append({"speaker": speaker, "text": text, "start_s": None,
                        "duration_s": None})
    return out


def _pick(rng, pool):
    return pool[int(rng.integers(len(pool)))]


def _hi_session(rng) -> list[tuple[str, str]]:
    topic = TOPIC_POOLS[_pick(rng, TOPIC_NAMES)]
    n_rounds = int(rng.integers(10, 17))
    turns = []
    for r in range(n_rounds):
        t_parts = [_pick(rng, THERAPIST_REFLECTIONS)]
        if rng.random() < 0.55:
            t_parts.append(_pick(rng, THERAPIST_QUESTIONS))
        turns.append(("therapist", " ".join(t_parts)))

        phase = r / max(n_rounds - 1, 1)
        c_parts = []
        if rng.random() < 0.15:
            c_parts.append(_pick(rng, CLIENT_ACKNOWLEDGE))
        else:
            c_parts.append(_pick(rng, topic))
            if rng.random() < 0.6:
                mood = CLIENT_POSITIVE if phase > 0.5 else CLIENT_NEGATIVE
                c_parts.append(_pick(rng, mood))
        if rng.random() < 0.35:
            c_parts.append(_pick(rng, CLIENT_QUESTIONS))
        turns.append(("client", " ".join(c_parts)))
    return turns


def _lo_session(rng) -> list[tuple[str, str]]:
    n_rounds = 1 if rng.random() < 0.6 else 2
    turns = []
    topic_offset = int(rng.integers(len(TOPIC_NAMES)))
    for r in range(n_rounds):
        # therapist monologue, split into caption-like fragments, topic churning
        n_frag = int(rng.integers(2, 5))
        for f in range(n_frag):
            topic = TOPIC_POOLS[TOPIC_NAMES[(topic_offset + r * n_frag + f)
                                            % len(TOPIC_NAMES)]]
            parts = [_pick(rng, topic)]
            if rng.random() < 0.5:
                parts.append(_pick(rng, THERAPIST_QUESTIONS))
            turns.append(("therapist", " ".join(parts)))
        reply = _pick(rng, LOW_NEGATIVE_REPLIES if rng.random() < 0.45
                      else LOW_EFFORT_REPLIES)
        turns.append(("client", reply))
    # therapist closes, so merged sessions end therapist-heavy
    turns.append(("therapist", _pick(rng, THERAPIST_REFLECTIONS)))
    return turns


def generate_corpus(n_hi: int, n_lo: int, seed: int, out_dir: str | Path) -> list[Path]:
    """Write n_hi + n_lo labeled transcript JSON files; returns their paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for label, count in (("HI", n_hi), ("LO", n_lo)):
        for i in range(count):
            rng = child_rng(seed, "synth", label, i)
            turns = _hi_session(rng) if label == "HI" else _lo_session(rng)
            with_timing = rng.random() >= 0.07
            session_id = f"synth-{label.lower()}-{i:04d}"
            doc = {"session_id": session_id, "label": label,
                   "turns": _timed(turns, rng, with_timing)}
            path = out_dir / f"{session_id}.json"
            with open(path, "w", encoding="utf-8") as fh:
                json.dump(doc, fh, ensure_ascii=False, indent=1)
            paths.append(path)
    return paths
