import pytest

from engage.features import is_question, load_default_bank, question_features

from .conftest import make_transcript

BANK = load_default_bank()


class TestIsQuestion:
    @pytest.mark.parametrize("sentence,expected", [
        ("What do you think?", True),      # question mark
        ("where should we go", True),      # Q-word then auxiliary
        ("I am fine", False),
        ("tell me more", False),
        ("should what happen now", True),  # auxiliary then Q-word
        ("I wonder how could this work", True),
        ("should I leave now", False),     # inversion without a Q-word
    ])
    def test_rules(self, sentence, expected):
        assert is_question(sentence, BANK) is expected

    def test_case_insensitive(self):
        s = "where should we go"
        assert is_question(s, BANK) == is_question(s.upper(), BANK)

    def test_question_mark_monotonicity(self):
        for s in ["I am fine", "tell me more", "nothing here"]:
            base = is_question(s, BANK)
            assert is_question(s + "?", BANK) >= base


class TestQuestionFeatures:
    def test_hand_counts(self):
        turns = []
        # therapist asks one question in each of 4 turns; client asks 2 over 4 turns
        client_texts = ["What should I say?", "Okay.", "Fine.", "why is that"]
        for ct in client_texts:
            turns.append(("therapist", "How did that feel?"))
            turns.append(("client", ct))
        f = question_features(make_transcript(turns), BANK)
        assert f["F04"] == pytest.approx(0.5)
        assert f["F05"] == pytest.approx(1.0)
        assert f["F06"] == pytest.approx(0.5)

    def test_zero_therapist_questions_drops_ratio(self):
        t = make_transcript([("therapist", "I see."), ("client", "What now?")])
        f = question_features(t, BANK)
        assert "F06" not in f
        assert f["F04"] == 1.0

    def test_bigram_path_without_question_mark(self):
        t = make_transcript([("therapist", "go on."),
                             ("client", "i asked myself how could i change")])
        f = question_features(t, BANK)
        assert f["F04"] > 0

    def test_no_client_turns(self):
        t = make_transcript([("therapist", "What happened?")])
        f = question_features(t, BANK)
        assert "F04" not in f
        assert f["F05"] == 1.0
        assert f["F06"] == 0.0  # zero client questions over one therapist question

    def test_multiple_sentences_count_per_sentence(self):
        t = make_transcript([("therapist", "ok."),
                             ("client", "What now? What then? I see.")])
        f = question_features(t, BANK)
        assert f["F04"] == pytest.approx(2.0)
