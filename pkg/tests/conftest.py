import json

import pytest

from engage.corpus import parse_transcript


def pytest_runtest_logreport(report):
    """One PASS/FAIL line per acceptance criterion."""
    if report.when == "call" and "test_acceptance" in report.nodeid:
        name = report.nodeid.split("::")[-1]
        outcome = "PASS" if report.passed else "FAIL"
        print(f"\nACCEPTANCE {name}: {outcome}", flush=True)


def make_transcript(turns, session_id="s1", label=None):
    """Build a Transcript from (speaker, text) or (speaker, text, start, dur) tuples."""
    doc = {"session_id": session_id, "label": label, "turns": []}
    for t in turns:
        speaker, text = t[0], t[1]
        start, dur = (t[2], t[3]) if len(t) > 2 else (None, None)
        doc["turns"].append(
            {"speaker": speaker, "text": text, "start_s": start, "duration_s": dur})
    return parse_transcript(json.dumps(doc).encode(), "JSON")


@pytest.fixture
def toy_transcript():
    return make_transcript([
        ("therapist", "How are you today? Tell me more."),
        ("client", "I am fine. I feel good about the plan."),
        ("therapist", "That sounds like progress."),
        ("client", "What should I do next time?"),
    ])
