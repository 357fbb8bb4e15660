"""Event generation: grammar-driven sections, tempo-scaled stochastic voices,
per-key collision masking, convergence-triggered regime switches, and the
beyond-human demonstration textures.
"""

from __future__ import annotations

import numpy as np

from .canon import ConvergenceQuery, VoiceSpec, find_convergences, voice_times_until
from .events import NoteEvent, Piece, PITCH_MAX, VELOCITY_MAX
from .grammar import SymbolString
from .mapping import MappingTable, ParameterConfig, PitchSet, resolve
from .stochastic import (
    ConfigError,
    Constant,
    Distribution,
    InhomogeneousPoisson,
    MIN_IOI,
    sample,
    sample_ioi_stream,
)

KEY_RESET_WINDOW = 0.050  # seconds; electromechanical per-key reset time
MAX_EVENTS_PER_SECTION = 1_000_000


class InfeasibleError(ValueError):
    """A requested texture violates a hardware constraint; names the constraint."""


def _clamp_round(value: float, hi: int) -> int:
    return int(min(max(round(value), 0), hi))


def _sample_pitch(source, rng) -> int:
    if isinstance(source, PitchSet):
        return source.sample(rng)
    return _clamp_round(sample(source, rng), PITCH_MAX)


def _sample_velocity(dist: Distribution, rng) -> int:
    return _clamp_round(sample(dist, rng), VELOCITY_MAX)


def generate(symbols: SymbolString, table: MappingTable, rng,
             seed: int | None = None) -> Piece:
    """Render a symbol string into an onset-sorted event list.

    For every symbol, each voice advances from the section start by
    tempo-scaled IOI draws until the section duration elapses; pitch and
    velocity are drawn per event (velocity clamped to the 10-bit range).
    A voice's in-flight interval that would cross the section boundary is
    discarded, keeping sections statistically independent. Latency
    pre-adjustment is deliberately left to the hardware layer.
    """
    events: list[NoteEvent] = []
    sections: list[tuple[str, float, float]] = []
    t_cur = 0.0
    for index, (symbol, generation) in enumerate(symbols.symbols):
        cfg = resolve(table, symbol, generation)
        t_end = t_cur + cfg.duration
        for voice, ratio in enumerate(cfg.ratios):
            pitch_source = cfg.pitch_for_voice(voice)
            t_i = t_cur
            count = 0
            while t_i < t_end - 1e-12:
                raw = sample(cfg.ioi, rng)
                if raw <= 0 and isinstance(cfg.ioi, Constant):
                    raise ConfigError(
                        f"symbol {symbol!r}: constant IOI {raw} would never advance the section")
                tau = max(raw / ratio, MIN_IOI)
                pitch = _sample_pitch(pitch_source, rng)
                velocity = _sample_velocity(cfg.velocity, rng)
                events.append(NoteEvent(t_i, pitch, velocity, tau, voice,
                                        symbol, generation, index))
                t_i += tau
                count += 1
                if count > MAX_EVENTS_PER_SECTION:
                    raise ConfigError(
                        f"section {index} ({symbol!r}) exceeded {MAX_EVENTS_PER_SECTION} events; "
                        "IOI distribution too dense or degenerate")
        sections.append((symbol, t_cur, t_end))
        t_cur = t_end
    metadata = {"total_duration": t_cur}
    if seed is not None:
        metadata["seed"] = seed
    return Piece.from_events(events, sections, metadata)


def apply_collision_mask(piece: Piece, window: float = KEY_RESET_WINDOW) -> Piece:
    """Drop any event landing within the reset window of the previous surviving
    event on the same key, so the per-key IOI floor holds on the output.

    The comparison carries a nanosecond tolerance: events intended exactly at
    the reset limit are legal and must not be masked by float dust.
    """
    last_kept: dict[int, float] = {}
    kept: list[NoteEvent] = []
    for e in piece.events:
        prev = last_kept.get(e.pitch)
        if prev is not None and e.onset - prev < window - 1e-9:
            continue
        kept.append(e)
        last_kept[e.pitch] = e.onset
    return piece.with_events(kept)


# ---------------------------------------------------------------------------
# Convergence-triggered generation
# ---------------------------------------------------------------------------


def _render_fixed_onsets(onsets, voice: int, cfg_for, rng, section_of) -> list[NoteEvent]:
    """Events at predetermined onsets, with pitch/velocity from the active config."""
    out = []
    for t in onsets:
        cfg = cfg_for(t)
        pitch = _sample_pitch(cfg.pitch_for_voice(0), rng)
        velocity = _sample_velocity(cfg.velocity, rng)
        ioi = cfg.ioi.mean() if hasattr(cfg.ioi, "mean") else 0.1
        out.append(NoteEvent(float(t), pitch, velocity, max(ioi, MIN_IOI), voice,
                             section_of(t)[0], 0, section_of(t)[1]))
    return out


def generate_cp_discrete(canon_voices: tuple[VoiceSpec, VoiceSpec],
                         pre: ParameterConfig, post: ParameterConfig,
                         query: ConvergenceQuery, rng, switch_at: float | None = None) -> Piece:
    """Two canon voices plus one stochastic voice; the stochastic regime and the
    pitch/velocity laws switch at a convergence point.

    ``switch_at`` selects the convergence nearest that time (default: the one
    closest to mid-horizon). If the query finds no convergence the piece is
    generated without a switch and metadata records ``cp_time = None``.
    """
    horizon = query.horizon
    conv = find_convergences(query)
    cp_time = None
    if conv:
        target = switch_at if switch_at is not None else horizon / 2.0
        interior = [c for c in conv if 0.0 < c.time < horizon] or conv
        cp_time = min(interior, key=lambda c: abs(c.time - target)).time

    def active(t):
        return pre if (cp_time is None or t < cp_time) else post

    def section_of(t):
        if cp_time is None or t < cp_time:
            return ("pre", 0)
        return ("post", 1)

    events: list[NoteEvent] = []
    for vid, vs in enumerate(canon_voices):
        onsets = voice_times_until(vs, horizon - 1e-9)
        events.extend(_render_fixed_onsets(onsets, vid, active, rng, section_of))

    # stochastic voice: homogeneous segments on either side of the switch
    segments = [(0.0, horizon, pre)] if cp_time is None else [
        (0.0, cp_time, pre), (cp_time, horizon, post)]
    for seg_start, seg_end, cfg in segments:
        onsets = sample_ioi_stream(cfg.ioi, seg_end - seg_start, rng) + seg_start
        events.extend(
            _render_fixed_onsets(onsets, len(canon_voices), active, rng, section_of))

    sections = ((("pre", 0.0, horizon),) if cp_time is None
                else (("pre", 0.0, cp_time), ("post", cp_time, horizon)))
    return Piece.from_events(events, sections, {"cp_time": cp_time})


def generate_cp_continuous(canon_voices: tuple[VoiceSpec, VoiceSpec],
                           rate_fn, rate_max: float, horizon: float,
                           cfg: ParameterConfig, rng) -> Piece:
    """Canon voices plus an inhomogeneous Poisson voice thinned against rate_max."""
    events: list[NoteEvent] = []

    def active(t):
        return cfg

    def section_of(t):
        return ("modulated", 0)

    for vid, vs in enumerate(canon_voices):
        onsets = voice_times_until(vs, horizon - 1e-9)
        events.extend(_render_fixed_onsets(onsets, vid, active, rng, section_of))
    poisson = InhomogeneousPoisson(rate_fn, rate_max)
    onsets = sample_ioi_stream(poisson, horizon, rng)
    events.extend(_render_fixed_onsets(onsets, len(canon_voices), active, rng, section_of))
    return Piece.from_events(events, (("modulated", 0.0, horizon),), {})


# ---------------------------------------------------------------------------
# Beyond-human textures (exact, deterministic event grids)
# ---------------------------------------------------------------------------

MAX_SINGLE_KEY_RATE = 1.0 / KEY_RESET_WINDOW  # 20 Hz


def generate_beyond_human(kind: str, **cfg) -> Piece:
    """Deterministic showcase textures, exact at the event level.

    kinds:
      polyphony -- chords of `chord_size` distinct pitches every `period` s
      trill     -- `rate_hz` alternation across `keys`; per-key rate must stay
                   within the key reset limit
      arpeggio  -- `span` consecutive semitones upward at `ioi` s
    """
    if kind == "polyphony":
        chord_size = int(cfg.get("chord_size", 40))
        period = float(cfg.get("period", 0.5))
        n_chords = int(cfg.get("n_chords", 8))
        velocity = int(cfg.get("velocity", 800))
        if chord_size > 88:
            raise InfeasibleError("polyphony: chord size exceeds the 88-key limit")
        if period < KEY_RESET_WINDOW:
            raise InfeasibleError("polyphony: chord period violates the per-key reset time")
        pitches = np.linspace(21, 108, chord_size).round().astype(int)
        if len(set(pitches.tolist())) < chord_size:
            raise InfeasibleError("polyphony: cannot place that many distinct pitches")
        events = [NoteEvent(k * period, int(p), velocity, period * 0.9, 0, "P", 0, 0)
                  for k in range(n_chords) for p in pitches]
        total = n_chords * period
    elif kind == "trill":
        rate_hz = float(cfg.get("rate_hz", 30.0))
        keys = tuple(cfg.get("keys", (60, 62)))
        duration = float(cfg.get("duration", 4.0))
        velocity = int(cfg.get("velocity", 800))
        per_key = rate_hz / len(keys)
        if per_key > MAX_SINGLE_KEY_RATE + 1e-9:
            raise InfeasibleError(
                f"trill: per-key rate {per_key:.1f} Hz exceeds the "
                f"{MAX_SINGLE_KEY_RATE:.0f} Hz key reset limit; add alternating keys")
        step = 1.0 / rate_hz
        n = int(round(duration * rate_hz))
        events = [NoteEvent(k * step, keys[k % len(keys)], velocity, step * 0.9, 0, "T", 0, 0)
                  for k in range(n)]
        total = duration
    elif kind == "arpeggio":
        span = int(cfg.get("span", 72))
        ioi = float(cfg.get("ioi", 0.025))
        start = int(cfg.get("start", 24))
        velocity = int(cfg.get("velocity", 800))
        if start + span - 1 > PITCH_MAX:
            raise InfeasibleError("arpeggio: span leaves the 88-key range")
        events = [NoteEvent(k * ioi, start + k, velocity, ioi, 0, "R", 0, 0)
                  for k in range(span)]
        total = span * ioi
    else:
        raise ValueError(f"unknown beyond-human kind {kind!r}")
    return Piece.from_events(events, ((kind, 0.0, total),), {"kind": kind})
