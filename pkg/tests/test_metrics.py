import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polycanon.events import NoteEvent
from polycanon.grammar import expand
from polycanon.metrics import (
    MetricError,
    contour,
    discretize_events,
    estimate_weights,
    information_rate,
    levenshtein,
    lz_complexity,
    melodic_coherence,
    normalized_lz,
    pcs_distance,
    pitch_class_concentration,
    rhythmic_coherence,
    rqa_determinism,
    voice_separation,
)
from polycanon.presets import fibonacci_grammar
from polycanon.stochastic import make_rng

STRINGS = {d: expand(fibonacci_grammar(), d).text for d in range(9)}


def make_voice(pitches, velocities=None, step=0.5, voice=0):
    velocities = velocities or [500] * len(pitches)
    return [NoteEvent(i * step, p, v, 0.1, voice=voice)
            for i, (p, v) in enumerate(zip(pitches, velocities))]


# -- contours and coherence ---------------------------------------------------


def test_contour_encoding():
    assert list(contour([60, 62, 62, 58])) == [1, 0, -1]
    with pytest.raises(MetricError):
        contour([60])


def test_levenshtein_matches_reference_dp():
    def brute(a, b):
        dp = list(range(len(b) + 1))
        for i, ca in enumerate(a, 1):
            new = [i]
            for j, cb in enumerate(b, 1):
                new.append(min(dp[j] + 1, new[-1] + 1, dp[j - 1] + (ca != cb)))
            dp = new
        return dp[-1]

    rng = np.random.default_rng(0)
    for _ in range(150):
        a = rng.integers(0, 3, rng.integers(0, 15))
        b = rng.integers(0, 3, rng.integers(0, 15))
        assert levenshtein(a, b) == brute(list(a), list(b))


def test_melodic_coherence_examples():
    assert melodic_coherence([60, 62, 64], [60, 62, 64]) == pytest.approx(1.0)
    assert melodic_coherence([60, 62, 64], [60, 58, 56]) == pytest.approx(1 / 3)
    with pytest.raises(MetricError):
        melodic_coherence([60], [60, 62])


def test_rhythmic_coherence_examples():
    x = np.array([0.1, 0.2, 0.3, 0.4])
    assert rhythmic_coherence(x, x) == pytest.approx(1.0)
    assert rhythmic_coherence([1.0, 1.1], [5.0, 5.1]) == pytest.approx(0.0)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(0, 127), min_size=2, max_size=40),
       st.lists(st.integers(0, 127), min_size=2, max_size=40))
def test_mc_bounds_and_symmetry(x, y):
    mc = melodic_coherence(x, y)
    assert 0.0 <= mc <= 1.0
    assert mc == pytest.approx(melodic_coherence(y, x))
    assert melodic_coherence(x, x) == pytest.approx(1.0)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(0.001, 5.0), min_size=1, max_size=40),
       st.lists(st.floats(0.001, 5.0), min_size=1, max_size=40))
def test_rc_bounds_and_symmetry(x, y):
    rc = rhythmic_coherence(x, y)
    assert 0.0 <= rc <= 1.0
    assert rc == pytest.approx(rhythmic_coherence(y, x))


def test_pcc_examples():
    assert pitch_class_concentration([60] * 9) == pytest.approx(1.0)
    assert pitch_class_concentration(list(range(48, 60))) == pytest.approx(0.0)
    c_major = [48, 50, 52, 53, 55, 57, 59]
    expected = 1 - math.log2(7) / math.log2(12)
    assert pitch_class_concentration(c_major) == pytest.approx(expected, abs=1e-4)


# -- voice separation ---------------------------------------------------------


def test_voice_separation_identical_is_zero():
    v = make_voice([60, 64, 67, 72])
    vss, wvss, nwvss = voice_separation(v, list(v))
    assert vss == wvss == nwvss == 0.0


def test_voice_separation_pitch_only_oracle():
    vi = make_voice([0, 2])
    vj = make_voice([1, 3])
    vss, _, _ = voice_separation(vi, vj)
    assert vss == pytest.approx(1 / 3)


def test_voice_separation_requires_two_events():
    with pytest.raises(MetricError):
        voice_separation(make_voice([60]), make_voice([60, 62]))


def test_estimate_weights_single_domain():
    vi = make_voice([60, 60, 60, 60], velocities=[100, 100, 100, 100])
    vj = make_voice([60, 60, 60, 60], velocities=[900, 900, 900, 900])
    w = estimate_weights([vi, vj])
    assert w.w_velocity == pytest.approx(1.0)
    assert w.w_pitch == 0.0 and w.w_temporal == 0.0


def test_estimate_weights_degenerate_falls_back_uniform():
    v = make_voice([60, 60, 60])
    with pytest.warns(UserWarning):
        w = estimate_weights([v, list(v)])
    assert w.as_tuple() == pytest.approx((1 / 3, 1 / 3, 1 / 3))


def test_pcs_distance_examples():
    vi = make_voice([60, 64, 67, 60, 64, 67], step=0.3)
    assert pcs_distance(vi, list(vi)) == pytest.approx(0.0)
    vj = make_voice([61, 66, 70, 61, 66, 70], step=0.3)
    assert pcs_distance(vi, vj) == pytest.approx(1.0)


def test_pcs_distance_matches_window_oracle():
    rng = make_rng(8)
    c_major = [48 + c for c in (0, 2, 4, 5, 7, 9, 11)]
    vi = [NoteEvent(float(t), int(rng.choice(c_major)), 500, 0.1)
          for t in np.sort(rng.uniform(0, 5, 60))]
    vj = [NoteEvent(float(t), int(rng.integers(48, 85)), 500, 0.1, voice=1)
          for t in np.sort(rng.uniform(0, 5, 60))]
    ours = pcs_distance(vi, vj, window=1.0)
    dists = []
    for k in range(5):
        hi_ = np.zeros(12)
        hj_ = np.zeros(12)
        for e in vi:
            if k <= e.onset < k + 1:
                hi_[e.pitch % 12] += 1
        for e in vj:
            if k <= e.onset < k + 1:
                hj_[e.pitch % 12] += 1
        if hi_.any() and hj_.any():
            dists.append(1 - hi_ @ hj_ / (np.linalg.norm(hi_) * np.linalg.norm(hj_)))
    assert ours == pytest.approx(np.mean(dists))
    assert 0.0 < ours < 1.0


def test_pcs_distance_silent_voice_errors():
    vi = make_voice([60, 62])
    with pytest.raises(MetricError):
        pcs_distance(vi, [])


# -- sequence measures --------------------------------------------------------


@pytest.mark.parametrize("depth,expected", [(4, 0.522), (5, 0.344), (6, 0.420), (7, 0.357)])
def test_information_rate_reference_values(depth, expected):
    assert information_rate(STRINGS[depth]) == pytest.approx(expected, abs=1e-3)


def test_information_rate_degenerate_and_bounds():
    assert information_rate("AAAA") == 0.0
    with pytest.raises(MetricError):
        information_rate("A")


@settings(max_examples=60, deadline=None)
@given(st.text(alphabet="ABC", min_size=2, max_size=60))
def test_information_rate_entropy_bounds(s):
    from collections import Counter

    def entropy(symbols):
        counts = Counter(symbols)
        n = len(symbols)
        return -sum(c / n * math.log2(c / n) for c in counts.values())

    ir = information_rate(s)
    assert ir >= 0.0
    assert ir <= min(entropy(s[:-1]), entropy(s[1:])) + 1e-9


@pytest.mark.parametrize("depth,expected", [(4, 5), (5, 6), (6, 7), (7, 8)])
def test_lz_reference_values(depth, expected):
    assert lz_complexity(STRINGS[depth]) == expected


def test_lz_trivial_cases():
    assert lz_complexity("A") == 1
    assert lz_complexity("AAAAAAA") == 2  # "A" then the reproducible tail


@pytest.mark.parametrize("depth,expected", [(4, 0.692), (6, 0.764), (8, 0.781)])
def test_det_reference_values(depth, expected):
    assert rqa_determinism(STRINGS[depth]) == pytest.approx(expected, abs=1e-3)


def test_det_hand_derivation_depth4():
    assert rqa_determinism(STRINGS[4]) == pytest.approx(9 / 13)


def test_det_no_recurrence():
    assert rqa_determinism("ABCD") == 0.0


@settings(max_examples=40, deadline=None)
@given(st.text(alphabet="AB", min_size=2, max_size=50))
def test_det_bounds(s):
    assert 0.0 <= rqa_determinism(s) <= 1.0


# -- discretized stream complexity -------------------------------------------


def periodic_events(n, period=0.25):
    return [NoteEvent(i * period, 60, 500, 0.1) for i in range(n)]


def test_normalized_lz_constant_stream_vanishes():
    short = normalized_lz(periodic_events(50))
    long = normalized_lz(periodic_events(800))
    assert long < short
    assert long < 0.02


def test_normalized_lz_random_exceeds_structured(canonical):
    rng = make_rng(12)
    n = 600
    random_events = [NoteEvent(float(t), int(rng.integers(0, 128)), 500, 0.05)
                     for t in np.sort(rng.uniform(0, 10, n))]
    structured = list(canonical.events[:n])
    assert normalized_lz(random_events) > normalized_lz(structured)


def test_discretize_events_shape():
    symbols = discretize_events(periodic_events(10))
    assert len(symbols) == 9
    assert all(0 <= b < 8 and 0 <= c < 12 for b, c in symbols)


def test_metric_report_validation_and_serialization():
    from polycanon.metrics import MetricReport

    report = MetricReport(mc=0.7, vss=3.5, lz=5)
    assert report.as_dict() == {"mc": 0.7, "vss": 3.5, "lz": 5}
    assert '"mc": 0.7' in report.to_json()
    row = report.to_csv_row().split(",")
    assert row[MetricReport.FIELDS.index("mc")] == "0.7"
    assert row[MetricReport.FIELDS.index("rc")] == ""
    with pytest.raises(MetricError):
        MetricReport(mc=1.5)
    with pytest.raises(MetricError):
        MetricReport(vss=-1.0)
