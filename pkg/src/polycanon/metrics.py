"""Structural metrics over event streams and symbol sequences.

Coherence metrics (contour edit similarity, IOI-distribution similarity,
pitch-class concentration), Wasserstein voice-separation scores with
weighted and range-normalized variants, windowed pitch-class-set distance,
and the sequence measures: bigram information rate, incremental-dictionary
parsing complexity, and recurrence determinism.
"""

from __future__ import annotations

import math
import warnings
from collections import Counter
from dataclasses import dataclass
from typing import Hashable, Sequence

import numpy as np

from .events import NoteEvent, voice_iois
from .stats import ks_distance, wasserstein1

LOG2_12 = math.log2(12)

# Normalisation ranges for nwVSS: full pitch range, 10-bit velocity range,
# and the log-IOI span covering 1 ms .. 10 s.
RANGE_PITCH = 127.0
RANGE_VELOCITY = 1023.0
RANGE_TEMPORAL = math.log(10.0 / 0.001)


class MetricError(ValueError):
    pass


@dataclass(frozen=True)
class MetricReport:
    """Bundle of metric values for one analysis; every field is optional.

    Unit-interval metrics are validated when present; serializes to a JSON
    document or a flat CSV row with a fixed column order.
    """

    mc: float | None = None
    rc: float | None = None
    pcc: float | None = None
    vss: float | None = None
    wvss: float | None = None
    nwvss: float | None = None
    pcs: float | None = None
    ir: float | None = None
    lz: int | None = None
    det: float | None = None
    nlz: float | None = None

    FIELDS = ("mc", "rc", "pcc", "vss", "wvss", "nwvss", "pcs", "ir", "lz", "det", "nlz")

    def __post_init__(self):
        for name in ("mc", "rc", "pcc", "det", "pcs"):
            value = getattr(self, name)
            if value is not None and not 0.0 <= value <= 1.0 + 1e-12:
                raise MetricError(f"{name} = {value} outside [0, 1]")
        if self.vss is not None and self.vss < 0:
            raise MetricError(f"vss = {self.vss} is negative")

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.FIELDS if getattr(self, k) is not None}

    def to_json(self) -> str:
        import json

        return json.dumps(self.as_dict(), indent=1)

    @classmethod
    def csv_header(cls) -> str:
        return ",".join(cls.FIELDS)

    def to_csv_row(self) -> str:
        return ",".join("" if getattr(self, k) is None else repr(getattr(self, k))
                        for k in self.FIELDS)


# ---------------------------------------------------------------------------
# Contours and coherence
# ---------------------------------------------------------------------------


def contour(pitches) -> np.ndarray:
    """Up/Down/Same steps between consecutive pitches, encoded as +1/-1/0."""
    p = np.asarray(pitches)
    if p.size < 2:
        raise MetricError("contour needs at least two pitches")
    return np.sign(np.diff(p.astype(float))).astype(np.int8)


def levenshtein(a: Sequence, b: Sequence) -> int:
    """Classic edit distance between 1-D sequences, fully row-vectorised.

    The insertion recurrence cur[j] = min(w[j-1], cur[j-1] + 1) telescopes to
    a running minimum of w[t] - t, so each DP row is pure numpy.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.size == 0:
        return int(b.size)
    if b.size == 0:
        return int(a.size)
    m = b.size
    offsets = np.arange(m)
    prev = np.arange(m + 1, dtype=np.int64)
    for i in range(1, a.size + 1):
        w = np.minimum(prev[:-1] + (b != a[i - 1]), prev[1:] + 1)
        running = np.minimum.accumulate(w - offsets)
        cur = np.empty(m + 1, dtype=np.int64)
        cur[0] = i
        cur[1:] = offsets + np.minimum(i + 1, running)
        prev = cur
    return int(prev[-1])


def melodic_coherence(x_pitches, y_pitches) -> float:
    """Edit similarity of pitch contours, normalised by the longer pitch sequence."""
    x = np.asarray(x_pitches)
    y = np.asarray(y_pitches)
    if x.size < 2 or y.size < 2:
        raise MetricError("melodic_coherence needs pitch sequences of length >= 2")
    d = levenshtein(contour(x), contour(y))
    return 1.0 - d / max(x.size, y.size)


def rhythmic_coherence(x_iois, y_iois) -> float:
    """One minus the KS distance between two IOI samples."""
    return 1.0 - ks_distance(x_iois, y_iois)


def pitch_class_concentration(pitches) -> float:
    """1 - H(pitch class) / log2(12); 1 = single class, 0 = uniform chromatic."""
    p = np.asarray(pitches, dtype=int)
    if p.size == 0:
        raise MetricError("pitch_class_concentration needs a non-empty pitch sequence")
    counts = np.bincount(p % 12, minlength=12).astype(float)
    probs = counts[counts > 0] / p.size
    h = -np.sum(probs * np.log2(probs))
    return float(1.0 - h / LOG2_12)


# ---------------------------------------------------------------------------
# Voice separation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WeightVector:
    w_pitch: float
    w_velocity: float
    w_temporal: float

    def __post_init__(self):
        total = self.w_pitch + self.w_velocity + self.w_temporal
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"weights must sum to 1, got {total}")
        if min(self.w_pitch, self.w_velocity, self.w_temporal) < 0:
            raise ValueError("weights must be non-negative")

    def as_tuple(self):
        return (self.w_pitch, self.w_velocity, self.w_temporal)


UNIFORM_WEIGHTS = WeightVector(1 / 3, 1 / 3, 1 / 3)


def _domain_marginals(events: Sequence[NoteEvent]):
    if len(events) < 2:
        raise MetricError("voice separation needs >= 2 events per voice")
    pitches = np.array([e.pitch for e in events], dtype=float)
    velocities = np.array([e.velocity for e in events], dtype=float)
    iois = voice_iois(events)
    iois = iois[iois > 0]
    if iois.size == 0:
        raise MetricError("voice has no positive inter-onset intervals")
    return pitches, velocities, np.log(iois)


def separation_components(events_i, events_j) -> tuple[float, float, float]:
    """W1 distances between two voices' pitch, velocity and log-IOI marginals."""
    pi, vi, ti = _domain_marginals(events_i)
    pj, vj, tj = _domain_marginals(events_j)
    return (wasserstein1(pi, pj), wasserstein1(vi, vj), wasserstein1(ti, tj))


def voice_separation(events_i, events_j, weights: WeightVector | None = None):
    """(VSS, wVSS, nwVSS) for one voice pair.

    VSS is the plain mean of the three W1 components; wVSS weights the raw
    components; nwVSS weights the range-normalised components. With no
    weight vector the uniform one is used, making wVSS coincide with VSS.
    """
    w = weights or UNIFORM_WEIGHTS
    wp, wv, wt = w.as_tuple()
    dp, dv, dt = separation_components(events_i, events_j)
    vss = (dp + dv + dt) / 3.0
    wvss = wp * dp + wv * dv + wt * dt
    nwvss = wp * dp / RANGE_PITCH + wv * dv / RANGE_VELOCITY + wt * dt / RANGE_TEMPORAL
    return vss, wvss, nwvss


def estimate_weights(voices: Sequence[Sequence[NoteEvent]], normalized: bool = False) -> WeightVector:
    """Per-domain weights proportional to the mean pairwise W1 separation.

    With ``normalized`` the components are divided by their domain ranges
    before weighting (the nwVSS convention). Degenerate all-zero separation
    falls back to uniform weights with a warning.
    """
    if len(voices) < 2:
        raise MetricError("estimate_weights needs >= 2 voices")
    totals = np.zeros(3)
    n_pairs = 0
    for i in range(len(voices)):
        for j in range(i + 1, len(voices)):
            comps = np.array(separation_components(voices[i], voices[j]))
            if normalized:
                comps = comps / np.array([RANGE_PITCH, RANGE_VELOCITY, RANGE_TEMPORAL])
            totals += comps
            n_pairs += 1
    means = totals / n_pairs
    total = means.sum()
    if total <= 0:
        warnings.warn("all separation components are zero; using uniform weights")
        return UNIFORM_WEIGHTS
    w = means / total
    return WeightVector(float(w[0]), float(w[1]), float(w[2]))


def pcs_distance(events_i, events_j, window: float = 1.0) -> float:
    """Mean windowed (1 - cosine) distance between pitch-class histograms.

    Windows where either voice is silent are skipped; a voice silent in
    every shared window is an error.
    """
    if window <= 0:
        raise MetricError("window must be > 0")
    oi = np.array([e.onset for e in events_i])
    oj = np.array([e.onset for e in events_j])
    if oi.size == 0 or oj.size == 0:
        raise MetricError("pcs_distance needs non-empty voices")
    t_end = max(oi.max(), oj.max())
    n_windows = max(1, int(math.ceil((t_end + 1e-9) / window)))
    pi = np.array([e.pitch for e in events_i]) % 12
    pj = np.array([e.pitch for e in events_j]) % 12
    dists = []
    for k in range(n_windows):
        lo, hi = k * window, (k + 1) * window
        hist_i = np.bincount(pi[(oi >= lo) & (oi < hi)], minlength=12).astype(float)
        hist_j = np.bincount(pj[(oj >= lo) & (oj < hi)], minlength=12).astype(float)
        ni, nj = np.linalg.norm(hist_i), np.linalg.norm(hist_j)
        if ni == 0 or nj == 0:
            continue
        dists.append(1.0 - float(hist_i @ hist_j) / (ni * nj))
    if not dists:
        raise MetricError("one voice is silent in every aligned window")
    return float(np.mean(dists))


# ---------------------------------------------------------------------------
# Sequence measures
# ---------------------------------------------------------------------------


def information_rate(seq: Sequence[Hashable]) -> float:
    """Plug-in mutual information (bits) between consecutive symbols."""
    seq = list(seq)
    if len(seq) < 2:
        raise MetricError("information_rate needs a sequence of length >= 2")
    pairs = list(zip(seq[:-1], seq[1:]))
    n = len(pairs)
    joint = Counter(pairs)
    left = Counter(a for a, _ in pairs)
    right = Counter(b for _, b in pairs)
    mi = 0.0
    for (a, b), c in joint.items():
        p = c / n
        mi += p * math.log2(p * n * n / (left[a] * right[b]))
    return max(mi, 0.0)


def lz_complexity(seq: Sequence[Hashable]) -> int:
    """Incremental-dictionary phrase count.

    Each phrase is the shortest prefix of the unparsed remainder that does not
    occur as a substring of the text before the phrase's last symbol; a
    trailing incomplete phrase counts as one.
    """
    seq = tuple(seq)
    n = len(seq)
    if n == 0:
        raise MetricError("lz_complexity needs a non-empty sequence")
    # map symbols onto characters so the substring search runs at C speed
    codebook: dict = {}
    for s in seq:
        codebook.setdefault(s, len(codebook))
    text = "".join(chr(0x100 + codebook[s]) for s in seq)

    phrases = 0
    pos = 0
    while pos < n:
        k = 1
        while pos + k <= n and text.find(text[pos:pos + k], 0, pos + k - 1) != -1:
            k += 1
        phrases += 1
        pos += k
    return phrases


def rqa_determinism(seq: Sequence[Hashable], min_line: int = 2) -> float:
    """Share of recurrence points lying on diagonal lines of length >= min_line.

    Recurrence matrix R(i, j) = 1 iff seq[i] == seq[j], main diagonal excluded.
    Computed on the upper triangle (the ratio is triangle-invariant). A
    sequence with no recurrence points scores 0.
    """
    seq = list(seq)
    n = len(seq)
    if n < 2:
        raise MetricError("rqa_determinism needs a sequence of length >= 2")
    labels = {s: i for i, s in enumerate(dict.fromkeys(seq))}
    codes = np.array([labels[s] for s in seq])
    total = 0
    on_lines = 0
    for d in range(1, n):
        eq = codes[:-d] == codes[d:]
        total += int(eq.sum())
        if not eq.any():
            continue
        # run lengths of consecutive recurrences along this diagonal
        padded = np.concatenate([[0], eq.astype(np.int8), [0]])
        edges = np.flatnonzero(np.diff(padded))
        runs = edges[1::2] - edges[0::2]
        on_lines += int(runs[runs >= min_line].sum())
    if total == 0:
        return 0.0
    return on_lines / total


# ---------------------------------------------------------------------------
# Event-stream discretisation and normalised parsing complexity
# ---------------------------------------------------------------------------

IOI_BINS = 8
IOI_LO = 0.001
IOI_HI = 10.0


def discretize_events(events: Sequence[NoteEvent]) -> list[tuple[int, int]]:
    """(log-IOI bin, pitch class) joint symbols for a sorted event stream.

    IOIs are taken between consecutive onsets of the full stream and quantised
    into 8 logarithmic bins spanning 1 ms .. 10 s; the first event (no IOI)
    is dropped.
    """
    if len(events) < 2:
        raise MetricError("discretize_events needs >= 2 events")
    onsets = np.array([e.onset for e in events])
    pitches = np.array([e.pitch for e in events])
    order = np.argsort(onsets, kind="mergesort")
    iois = np.diff(onsets[order])
    iois = np.clip(iois, IOI_LO, IOI_HI)
    log_span = math.log(IOI_HI / IOI_LO)
    bins = np.floor(IOI_BINS * np.log(iois / IOI_LO) / log_span).astype(int)
    bins = np.clip(bins, 0, IOI_BINS - 1)
    classes = pitches[order][1:] % 12
    return list(zip(bins.tolist(), classes.tolist()))


def normalized_lz(events: Sequence[NoteEvent]) -> float:
    """Parsing complexity per event of the discretised stream."""
    symbols = discretize_events(events)
    return lz_complexity(symbols) / len(symbols)
