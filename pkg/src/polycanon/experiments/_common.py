"""Shared condition generators and helpers for the experiment harness."""

from __future__ import annotations

import numpy as np

from ..events import NoteEvent, Piece
from ..grammar import expand
from ..mapping import PitchSet
from ..metrics import melodic_coherence, pitch_class_concentration
from ..pipeline import apply_collision_mask, generate
from ..presets import canonical_table, fibonacci_grammar
from ..stochastic import derive_rng


def canonical_piece(seed: int, depth: int = 4, depth_weighted: bool = False) -> Piece:
    """The standard two-symbol render used by several experiments."""
    symbols = expand(fibonacci_grammar(), depth)
    rng = derive_rng(seed, "canonical-render" + ("-dw" if depth_weighted else ""))
    return generate(symbols, canonical_table(depth_weighted), rng, seed=seed)


def section_streams(piece: Piece):
    """Per-section (symbol, pitches, iois, velocities) over the merged voices."""
    out = []
    for index, (symbol, lo, hi) in enumerate(piece.sections):
        events = piece.section_events(index)
        onsets = np.array([e.onset for e in events])
        order = np.argsort(onsets, kind="mergesort")
        pitches = np.array([e.pitch for e in events])[order]
        velocities = np.array([e.velocity for e in events])[order]
        iois = np.diff(onsets[order])
        out.append((symbol, pitches, iois, velocities, hi - lo))
    return out


def pitch_pmf(ps: PitchSet):
    """Exact pmf of a pitch-set sampler: class choice then uniform octave."""
    values, probs = [], []
    n_classes = len(ps.classes)
    for i, c in enumerate(ps.classes):
        notes = ps._candidates(c)
        w = ps.weights[i] if ps.weights else 1.0 / n_classes
        for note in notes:
            values.append(note)
            probs.append(w / len(notes))
    order = np.argsort(values)
    return np.array(values)[order], np.array(probs)[order]


def discrete_cdf(values: np.ndarray, probs: np.ndarray):
    """Right-continuous CDF callable for a discrete law."""
    cum = np.cumsum(probs)

    def cdf(x):
        idx = np.searchsorted(values, np.asarray(x, dtype=float), side="right")
        return np.where(idx == 0, 0.0, cum[np.clip(idx - 1, 0, len(cum) - 1)])

    return cdf


# ---------------------------------------------------------------------------
# Density-sweep condition family
# ---------------------------------------------------------------------------
#
# Two interleaved voices track a slowly drifting register guide (triangle wave)
# while a density-dependent random walk perturbs each event's pitch; pitches
# snap to a fixed nine-class scale and the per-key reset mask is applied.
# The walk amplitude grows quadratically with aggregate density, so individual
# events carry less of the guide's melodic information as density rises.

SWEEP_SCALE = (0, 2, 3, 4, 5, 7, 9, 10, 11)
_ALLOWED = np.array([p for p in range(128) if p % 12 in SWEEP_SCALE])
SWEEP_LEVELS = (10, 15, 20, 25, 28, 30, 40, 50, 60, 80, 100, 120, 150, 200)
WALK_REF_DENSITY = 23.0
WALK_SIGMA_MAX = 5.0

# guide drift (semitones/s): slow for the contour-fidelity probe, faster for
# the register-coverage (concentration) probe
DRIFT_CONTOUR = 1.0
DRIFT_REGISTER = 1.6


def _snap(ps: np.ndarray) -> np.ndarray:
    idx = np.searchsorted(_ALLOWED, ps)
    idx = np.clip(idx, 1, len(_ALLOWED) - 1)
    lo, hi = _ALLOWED[idx - 1], _ALLOWED[idx]
    return np.where(np.abs(ps - lo) <= np.abs(ps - hi), lo, hi).astype(int)


def _reflect(x: np.ndarray, bound: float) -> np.ndarray:
    period = 4.0 * bound
    x = np.mod(x + bound, period)
    return np.where(x < 2 * bound, x, period - x) - bound


def walk_sigma(density: float) -> float:
    return min(3.0 * (density / WALK_REF_DENSITY) ** 2, WALK_SIGMA_MAX)


def _voice_iois(law: str, mean: float, count: int, rng) -> np.ndarray:
    if law == "constant":
        return np.full(count, mean)
    if law == "exponential":
        return rng.exponential(mean, count)
    if law == "uniform":
        return rng.uniform(0.1 * mean, 1.9 * mean, count)
    if law == "gaussian":
        return np.maximum(rng.normal(mean, 0.25 * mean, count), 1e-3)
    raise ValueError(f"unknown IOI law {law!r}")


def sweep_condition(density: float, law: str, rng, n_events: int | None = None,
                    duration: float | None = None, drift: float = DRIFT_CONTOUR,
                    register=(40, 88)):
    """One two-voice stream of the density-sweep family.

    Returns (per-voice list of (onsets, intended, realized), masked Piece).
    Exactly one of ``n_events`` (per voice) or ``duration`` must be given.
    """
    if (n_events is None) == (duration is None):
        raise ValueError("specify exactly one of n_events / duration")
    rate_v = density / 2.0
    mean = 1.0 / rate_v
    lo, hi = register
    span = hi - lo
    period = 2.0 * span / drift
    phase = rng.uniform(0, period)
    sigma = walk_sigma(density)
    bound = min(10.0 + density / 12.0, 26.0)
    voices, events = [], []
    for v in (0, 1):
        count = n_events if n_events else int(rate_v * duration * 2) + 20
        iois = _voice_iois(law, mean, count, rng)
        onsets = np.concatenate([[0.0], np.cumsum(iois[:-1])])
        if v == 1:
            onsets = onsets + 0.5 * mean
        if duration:
            onsets = onsets[onsets < duration]
        x = (onsets + phase) % period
        guide = lo + span * np.where(x < period / 2, 2 * x / period, 2 - 2 * x / period)
        walk = _reflect(np.cumsum(rng.normal(0, sigma, len(onsets))), bound)
        intended = _snap(np.round(guide))
        realized = _snap(np.round(np.clip(guide + walk, 0, 127)))
        voices.append((onsets, intended, realized))
        velocities = rng.integers(300, 701, len(onsets))
        events.extend(NoteEvent(float(t), int(p), int(w), 0.05, voice=v)
                      for t, p, w in zip(onsets, realized, velocities))
    piece = apply_collision_mask(Piece.from_events(events))
    return voices, piece


def sweep_contour_coherence(density: float, law: str, rng, trials: int = 5,
                            n_events: int = 100) -> float:
    """Mean contour fidelity of the surviving stream against the intended line."""
    values = []
    for _ in range(trials):
        voices, piece = sweep_condition(density, law, rng, n_events=n_events)
        for v, (onsets, intended, realized) in enumerate(voices):
            survivors = [e.pitch for e in piece.events if e.voice == v]
            if len(survivors) >= 2:
                values.append(melodic_coherence(survivors, intended))
            else:
                values.append(0.0)
    return float(np.mean(values))


def sweep_concentration(density: float, rng, trials: int = 10,
                        duration: float = 10.0) -> list[float]:
    """Per-trial pitch-class concentration of register-sweep streams."""
    values = []
    for _ in range(trials):
        _, piece = sweep_condition(density, "exponential", rng, duration=duration,
                                   drift=DRIFT_REGISTER)
        values.append(pitch_class_concentration([e.pitch for e in piece.events]))
    return values


def null_stream(density: float, rng, duration: float = 10.0) -> Piece:
    """Structureless baseline: uniform pitch and velocity, exponential IOIs."""
    onsets = np.cumsum(rng.exponential(1.0 / density, int(density * duration * 2) + 20))
    onsets = onsets[onsets < duration]
    events = [NoteEvent(float(t), int(rng.integers(0, 128)), int(rng.integers(0, 1024)),
                        0.05, voice=0) for t in onsets]
    return Piece.from_events(events)


def window_counts(piece: Piece, horizon: float, window: float = 1.0) -> np.ndarray:
    onsets = piece.onsets()
    n = int(round(horizon / window))
    counts = np.zeros(n)
    for k in range(n):
        counts[k] = np.sum((onsets >= k * window) & (onsets < (k + 1) * window))
    return counts / window
