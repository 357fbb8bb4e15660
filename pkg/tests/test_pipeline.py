import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polycanon.canon import ConvergenceQuery
from polycanon.events import NoteEvent, Piece
from polycanon.fileio import write_events_json
from polycanon.grammar import SymbolString, TaggedSymbol, expand
from polycanon.mapping import MappingTable, ParameterConfig, PitchSet
from polycanon.pipeline import (
    InfeasibleError,
    apply_collision_mask,
    generate,
    generate_beyond_human,
    generate_cp_discrete,
)
from polycanon.presets import canonical_table, cp_switch_configs, fibonacci_grammar, rational_canon
from polycanon.stats import ks_test
from polycanon.stochastic import ConfigError, Constant, Gaussian, make_rng


def one_symbol(symbol="X", gen=0):
    return SymbolString((TaggedSymbol(symbol, gen),), 0)


def simple_table(ioi=Constant(0.5), pitch=PitchSet((0,), 60, 60),
                 velocity=Constant(500), ratios=(1.0,), duration=2.0):
    return MappingTable({"X": ParameterConfig(ioi, pitch, velocity, ratios, duration)})


def test_deterministic_single_voice_grid():
    piece = generate(one_symbol(), simple_table(), make_rng(0))
    assert len(piece) == 4
    assert np.allclose(piece.onsets(), [0.0, 0.5, 1.0, 1.5])


def test_empty_string_gives_empty_piece():
    piece = generate(SymbolString((), 0), canonical_table(), make_rng(0))
    assert len(piece) == 0
    assert piece.sections == ()


def test_canonical_render_densities(canonical):
    assert 4200 <= len(canonical) <= 5100
    onsets = canonical.onsets()
    for index, (symbol, lo, hi) in enumerate(canonical.sections):
        density = np.sum((onsets >= lo) & (onsets < hi)) / (hi - lo)
        if symbol == "A":
            assert abs(density - 35.0) <= 5.0
        else:
            assert abs(density - 120.6) <= 15.0


def test_sections_tile_and_contain_their_events(canonical):
    sections = canonical.sections
    assert sections[0][1] == 0.0
    assert sections[-1][2] == pytest.approx(74.0)
    for (_, _, end), (_, start, _) in zip(sections, sections[1:]):
        assert end == pytest.approx(start)
    for e in canonical.events:
        _, lo, hi = sections[e.section]
        assert lo - 1e-9 <= e.onset < hi + 1e-9


def test_generation_is_deterministic_byte_for_byte(tmp_path, canonical):
    symbols = expand(fibonacci_grammar(), 4)
    from polycanon.stochastic import derive_rng
    again = generate(symbols, canonical_table(), derive_rng(42, "canonical-render"), seed=42)
    p1 = write_events_json(canonical, tmp_path / "a.json")
    p2 = write_events_json(again, tmp_path / "b.json")
    assert p1.read_bytes() == p2.read_bytes()


@settings(max_examples=25, deadline=None)
@given(st.floats(-5000, 5000), st.floats(0, 4000), st.integers(0, 2**31 - 1))
def test_velocity_clamp_under_extreme_gaussians(mu, sigma, seed):
    table = simple_table(velocity=Gaussian(mu, sigma), duration=1.0)
    piece = generate(one_symbol(), table, make_rng(seed))
    v = piece.velocities()
    assert v.min() >= 0 and v.max() <= 1023


def test_pitch_rounding_and_clamp():
    table = simple_table(pitch=Gaussian(200.0, 80.0), duration=1.0)
    piece = generate(one_symbol(), table, make_rng(3))
    p = piece.pitches()
    assert p.min() >= 0 and p.max() <= 127


def test_zero_constant_ioi_is_config_error():
    with pytest.raises(ConfigError):
        generate(one_symbol(), simple_table(ioi=Constant(0.0)), make_rng(0))


def test_collision_mask_examples():
    def piece_with(dt):
        return Piece.from_events([
            NoteEvent(0.0, 60, 500, 0.1),
            NoteEvent(dt, 60, 500, 0.1),
        ])

    assert len(apply_collision_mask(piece_with(0.030))) == 1
    assert len(apply_collision_mask(piece_with(0.060))) == 2


def test_collision_mask_enforces_per_key_floor():
    rng = make_rng(11)
    onsets = np.sort(rng.uniform(0, 5, 1000))  # ~200 notes/s
    events = [NoteEvent(float(t), int(rng.integers(50, 60)), 500, 0.05) for t in onsets]
    masked = apply_collision_mask(Piece.from_events(events))
    by_pitch = {}
    for e in masked.events:
        by_pitch.setdefault(e.pitch, []).append(e.onset)
    for pitch, times in by_pitch.items():
        gaps = np.diff(sorted(times))
        assert np.all(gaps >= 0.05 - 1e-9)


def test_cp_discrete_switch_and_null_switch():
    pre, post = cp_switch_configs()
    query = ConvergenceQuery(0.05, 30.0, *rational_canon())
    piece = generate_cp_discrete(rational_canon(), pre, post, query, make_rng(5), switch_at=15.0)
    assert piece.metadata["cp_time"] == pytest.approx(15.0)
    assert [s[0] for s in piece.sections] == ["pre", "post"]
    pre_rate = sum(e.onset < 15 for e in piece.events) / 15
    post_rate = sum(e.onset >= 15 for e in piece.events) / 15
    assert post_rate / pre_rate > 4

    null = generate_cp_discrete(rational_canon(), pre, pre, query, make_rng(6), switch_at=15.0)
    onsets = null.onsets()
    counts = np.array([np.sum((onsets >= k) & (onsets < k + 1)) for k in range(30)])
    assert ks_test(counts[:15], counts[15:]).p_value > 0.05


def test_cp_discrete_without_convergence_reports_none():
    pre, post = cp_switch_configs()
    offset = rational_canon()[0]
    from polycanon.canon import VoiceSpec
    v1 = VoiceSpec(3.0, 3.0, start=0.1234)
    v2 = VoiceSpec(4.0, 3.0, start=0.5678)
    query = ConvergenceQuery(0.001, 30.0, v1, v2)
    piece = generate_cp_discrete((v1, v2), pre, post, query, make_rng(7))
    assert piece.metadata["cp_time"] is None
    assert [s[0] for s in piece.sections] == ["pre"]


def test_beyond_human_polyphony_exact():
    piece = generate_beyond_human("polyphony", chord_size=40, period=0.5, n_chords=4)
    onsets = np.unique(piece.onsets())
    assert np.allclose(onsets, [0.0, 0.5, 1.0, 1.5])
    for t in onsets:
        chord = [e.pitch for e in piece.events if e.onset == t]
        assert len(chord) == len(set(chord)) == 40


def test_beyond_human_trill_rates():
    piece = generate_beyond_human("trill", rate_hz=30.0, keys=(60, 62), duration=2.0)
    onsets = piece.onsets()
    assert np.allclose(np.diff(onsets), 1 / 30)
    pitches = piece.pitches()
    assert set(pitches[::2]) == {60} and set(pitches[1::2]) == {62}
    with pytest.raises(InfeasibleError, match="key reset"):
        generate_beyond_human("trill", rate_hz=30.0, keys=(60,))


def test_beyond_human_arpeggio_exact():
    piece = generate_beyond_human("arpeggio", span=72, ioi=0.025, start=24)
    assert len(piece) == 72
    assert list(piece.pitches()) == list(range(24, 96))
    assert np.allclose(np.diff(piece.onsets()), 0.025)


def test_beyond_human_infeasible_configs():
    with pytest.raises(InfeasibleError):
        generate_beyond_human("polyphony", chord_size=100)
    with pytest.raises(InfeasibleError):
        generate_beyond_human("arpeggio", span=90, start=60)
    with pytest.raises(ValueError):
        generate_beyond_human("glissando")
