import math

import numpy as np
import pytest

from engage.errors import EmptyList
from engage.features import conv_features, moment_stats

from .conftest import make_transcript


def reference_moments(xs):
    """Brute-force population moments, written independently of the library."""
    n = len(xs)
    mean = sum(xs) / n
    m2 = sum((x - mean) ** 2 for x in xs) / n
    m3 = sum((x - mean) ** 3 for x in xs) / n
    m4 = sum((x - mean) ** 4 for x in xs) / n
    sd = math.sqrt(m2)
    skew = m3 / m2 ** 1.5 if m2 > 0 and n >= 3 else None
    kurt = m4 / m2 ** 2 - 3 if m2 > 0 and n >= 4 else None
    return mean, sd, skew, kurt


class TestMomentStats:
    def test_degenerate_constant(self):
        s = moment_stats([5, 5, 5])
        assert s.mean == 5 and s.sd == 0
        assert s.skew is None and s.kurt is None

    def test_hand_computed_1234(self):
        s = moment_stats([1, 2, 3, 4])
        assert s.mean == pytest.approx(2.5)
        assert s.sd == pytest.approx(1.118034, abs=1e-6)
        assert s.skew == pytest.approx(0.0, abs=1e-12)
        assert s.kurt == pytest.approx(-1.36)

    def test_symmetric_list_zero_skew(self):
        s = moment_stats([-3, -1, 0, 1, 3])
        assert s.skew == pytest.approx(0.0, abs=1e-12)

    def test_short_lists(self):
        assert moment_stats([1.0, 2.0]).skew is None
        assert moment_stats([1.0, 2.0, 3.0]).kurt is None
        assert moment_stats([1.0, 2.0, 3.0]).skew is not None

    def test_empty_raises(self):
        with pytest.raises(EmptyList):
            moment_stats([])

    def test_matches_bruteforce_on_random_vectors(self):
        rng = np.random.default_rng(7)
        for _ in range(1000):
            xs = rng.normal(size=rng.integers(4, 30)).tolist()
            s = moment_stats(xs)
            mean, sd, skew, kurt = reference_moments(xs)
            assert s.mean == pytest.approx(mean, abs=1e-9)
            assert s.sd == pytest.approx(sd, abs=1e-9)
            assert s.skew == pytest.approx(skew, abs=1e-9)
            assert s.kurt == pytest.approx(kurt, abs=1e-9)


class TestConvFeatures:
    def test_hand_counts(self):
        t = make_transcript([("therapist", "a b c"), ("client", "d e"), ("therapist", "f")])
        f = conv_features(t)
        assert f["F01"] == 2.0    # therapist mean words/turn
        assert f["F02"] == 2.0    # client mean words/turn
        assert f["F03"] == 1.0
        assert f["F07"] == 1.0
        assert f["F08"] == 2.0
        assert f["F09"] == 0.5

    def test_no_client_turns_leaves_client_slots_missing(self):
        t = make_transcript([("therapist", "a"), ("therapist", "b c")])
        f = conv_features(t)
        for fid in ("F02", "F03", "F07", "F09", "F16", "F17", "F18"):
            assert fid not in f
        assert "F01" in f and "F08" in f

    def test_duration_mean_over_timed_turns(self):
        t = make_transcript([
            ("therapist", "a", 0.0, 2.0),
            ("client", "b", 2.0, 4.0),
            ("therapist", "c"),
        ])
        assert conv_features(t)["F10"] == pytest.approx(3.0)

    def test_no_timing_no_f10(self):
        t = make_transcript([("therapist", "a"), ("client", "b")])
        assert "F10" not in conv_features(t)

    def test_ratio_identity_f09_f08_f07(self):
        t = make_transcript([("therapist", "x y")] + [("client", "z"), ("therapist", "w")] * 3)
        f = conv_features(t)
        assert f["F09"] * f["F08"] == pytest.approx(f["F07"])

    def test_duplicating_texts_keeps_means_doubles_counts(self):
        turns = [("therapist", "a b c d"), ("client", "e f"), ("therapist", "g h")]
        base = conv_features(make_transcript(turns))
        # same turn texts appearing twice as separate turns (client between to
        # avoid merges)
        doubled_turns = []
        for sp, tx in turns + turns:
            doubled_turns.append((sp, tx))
            doubled_turns.append(("client" if sp == "therapist" else "therapist", "pad"))
        doubled = conv_features(make_transcript(doubled_turns))
        assert doubled["F08"] > base["F08"]

    def test_mean_separation_of_count_vs_mean(self):
        # doubling every turn (non-adjacent) doubles F07/F08 but not F01/F02
        turns = [("therapist", "a b"), ("client", "c d e"),
                 ("therapist", "f g"), ("client", "h i j")]
        once = conv_features(make_transcript(turns))
        twice = conv_features(make_transcript(turns * 2))
        assert twice["F01"] == pytest.approx(once["F01"])
        assert twice["F02"] == pytest.approx(once["F02"])
        assert twice["F07"] == 2 * once["F07"]
        assert twice["F08"] == 2 * once["F08"]
