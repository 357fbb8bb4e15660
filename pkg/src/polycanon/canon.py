"""Tempo-canon voice timelines and tolerance-based convergence detection.

A voice with ratio r, base interval tau_base and acceleration alpha places its
k-th event at  T(k) = start + sum_{j<k} (tau_base / r) * alpha**j ;  alpha = 1
is the constant-tempo case T(k) = start + k * tau_base / r. Two voices converge
wherever some event pair lands within a tolerance window epsilon.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class VoiceSpec:
    ratio: float
    tau_base: float
    alpha: float = 1.0
    start: float = 0.0

    def __post_init__(self):
        if self.ratio <= 0:
            raise ValueError(f"ratio must be > 0, got {self.ratio}")
        if self.tau_base <= 0:
            raise ValueError(f"tau_base must be > 0, got {self.tau_base}")
        if self.alpha <= 0:
            raise ValueError(f"alpha must be > 0, got {self.alpha}")

    @property
    def base_ioi(self) -> float:
        return self.tau_base / self.ratio


@dataclass(frozen=True)
class ConvergenceEvent:
    time: float
    index_i: int
    index_j: int
    residual: float


@dataclass(frozen=True)
class ConvergenceQuery:
    epsilon: float
    horizon: float
    voice_i: VoiceSpec
    voice_j: VoiceSpec

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError(f"epsilon must be > 0, got {self.epsilon}")
        if self.horizon <= 0:
            raise ValueError(f"horizon must be > 0, got {self.horizon}")


def voice_ioi(v: VoiceSpec, k: int) -> float:
    """Interval between events k and k+1."""
    return v.base_ioi * v.alpha**k


def voice_time(v: VoiceSpec, k: int) -> float:
    """Onset of event k (k >= 0)."""
    if k < 0:
        raise ValueError(f"event index must be >= 0, got {k}")
    if v.alpha == 1.0:
        return v.start + k * v.base_ioi
    # geometric partial sum of the accelerating IOIs
    return v.start + v.base_ioi * (1.0 - v.alpha**k) / (1.0 - v.alpha)


def voice_times_until(v: VoiceSpec, horizon: float) -> np.ndarray:
    """All event onsets <= horizon."""
    if v.alpha == 1.0:
        n = int(math.floor((horizon - v.start) / v.base_ioi + 1e-9))
        if n < 0:
            return np.array([], dtype=float)
        return v.start + np.arange(n + 1) * v.base_ioi
    times = []
    t, k = v.start, 0
    while t <= horizon + 1e-12:
        times.append(t)
        t += voice_ioi(v, k)
        k += 1
        if len(times) > 10_000_000:
            raise ValueError("voice produces too many events before the horizon")
    return np.array(times, dtype=float)


def _candidate_pairs(q: ConvergenceQuery):
    """All (n_i, n_j) with |T_i - T_j| < epsilon and min(T) <= horizon, time-sorted."""
    vi, vj = q.voice_i, q.voice_j
    out = []
    if vi.alpha == 1.0 and vj.alpha == 1.0:
        # enumerate voice-i events; only the nearest voice-j indices can match
        n_max = int(math.floor((q.horizon + q.epsilon - vi.start) / vi.base_ioi)) + 1
        for n in range(n_max + 1):
            ti = voice_time(vi, n)
            m0 = round((ti - vj.start) / vj.base_ioi)
            for m in (m0 - 1, m0, m0 + 1):
                if m < 0:
                    continue
                tj = voice_time(vj, m)
                res = abs(ti - tj)
                if res < q.epsilon and min(ti, tj) <= q.horizon:
                    out.append(ConvergenceEvent(min(ti, tj), n, m, res))
    else:
        ti_all = voice_times_until(vi, q.horizon + q.epsilon)
        tj_all = voice_times_until(vj, q.horizon + q.epsilon)
        j0 = 0
        for n, ti in enumerate(ti_all):
            while j0 < len(tj_all) and tj_all[j0] < ti - q.epsilon:
                j0 += 1
            m = j0
            while m < len(tj_all) and tj_all[m] < ti + q.epsilon:
                res = abs(ti - tj_all[m])
                if res < q.epsilon and min(ti, tj_all[m]) <= q.horizon:
                    out.append(ConvergenceEvent(min(ti, tj_all[m]), n, m, res))
                m += 1
    out.sort(key=lambda e: (e.time, e.index_i, e.index_j))
    return out


def find_convergences(q: ConvergenceQuery) -> list[ConvergenceEvent]:
    """Convergence events within the horizon, one per physical crossing.

    Runs of coincident pairs whose times chain within one epsilon window are
    collapsed to the pair with the smallest residual, so a single crossing is
    never multiply counted under a generous tolerance.
    """
    merged: list[ConvergenceEvent] = []
    run_best: ConvergenceEvent | None = None
    run_last_time = None
    for ev in _candidate_pairs(q):
        if run_best is None or ev.time - run_last_time >= q.epsilon:
            if run_best is not None:
                merged.append(run_best)
            run_best = ev
        elif ev.residual < run_best.residual:
            run_best = ev
        run_last_time = ev.time
    if run_best is not None:
        merged.append(run_best)
    return merged


def next_convergence_after(q: ConvergenceQuery, t: float) -> ConvergenceEvent | None:
    """Earliest convergence strictly after t, or None inside the horizon."""
    for ev in find_convergences(q):
        if ev.time > t:
            return ev
    return None


def voice_from_config(cfg: dict) -> VoiceSpec:
    return VoiceSpec(
        ratio=float(cfg["ratio"]),
        tau_base=float(cfg["tau_base"]),
        alpha=float(cfg.get("alpha", 1.0)),
        start=float(cfg.get("start", 0.0)),
    )


def voice_to_config(v: VoiceSpec) -> dict:
    return {"ratio": v.ratio, "tau_base": v.tau_base, "alpha": v.alpha, "start": v.start}
