"""Hardware abstraction layer: velocity-dependent latency models, onset
pre-compensation, the uncalibrated-deployment robustness filter, power-law
calibration fitting, constraint enforcement, and mismatch simulation.

All three latency variants share the boundary conditions L(0) = L_max and
L(v_max) = L_min and are monotone non-increasing in velocity.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace

import numpy as np
from scipy import optimize
from scipy import stats as sps

from .events import NoteEvent, Piece, VELOCITY_MAX
from .pipeline import KEY_RESET_WINDOW


class FitError(ValueError):
    pass


@dataclass(frozen=True)
class LatencyModel:
    variant: str = "power"  # linear | power | log
    l_max: float = 30.0  # ms at velocity 0
    l_min: float = 10.0  # ms at velocity v_max
    c: float = 0.5       # power-law exponent
    k: float = 9.0       # log-curve curvature
    v_max: int = VELOCITY_MAX

    def __post_init__(self):
        if not self.l_max > self.l_min > 0:
            raise ValueError(f"need l_max > l_min > 0, got {self.l_max}, {self.l_min}")
        if self.variant == "power" and not 0 < self.c < 1:
            raise ValueError(f"power exponent must be in (0, 1), got {self.c}")
        if self.variant == "log" and self.k <= 0:
            raise ValueError(f"log curvature must be > 0, got {self.k}")
        if self.variant not in ("linear", "power", "log"):
            raise ValueError(f"unknown latency variant {self.variant!r}")


def latency(model: LatencyModel, v) -> np.ndarray | float:
    """Predicted actuation latency in ms for velocity command(s) v."""
    v_arr = np.asarray(v, dtype=float)
    if np.any(v_arr < 0) or np.any(v_arr > model.v_max):
        raise ValueError(f"velocity outside [0, {model.v_max}]")
    u = v_arr / model.v_max
    span = model.l_max - model.l_min
    if model.variant == "linear":
        out = model.l_max - span * u
    elif model.variant == "power":
        out = model.l_max - span * u**model.c
    else:
        out = model.l_max - span * np.log1p(model.k * u) / np.log1p(model.k)
    return float(out) if np.isscalar(v) or np.ndim(v) == 0 else out


def precompensate(piece: Piece, model: LatencyModel) -> Piece:
    """Shift every onset earlier by its predicted latency and re-sort."""
    shifted = [replace(e, onset=e.onset - latency(model, e.velocity) / 1000.0)
               for e in piece.events]
    return piece.with_events(shifted)


# ---------------------------------------------------------------------------
# Robustness filter (uncalibrated-deployment failsafe)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FilterConfig:
    window: float = KEY_RESET_WINDOW  # seconds
    gamma: float = 0.5                # compression toward the local mean
    spread_threshold: float = 200.0   # velocity spread that flags an event

    def __post_init__(self):
        if self.window <= 0:
            raise ValueError("filter window must be > 0")
        if not 0 <= self.gamma < 1:
            raise ValueError(f"gamma must be in [0, 1), got {self.gamma}")


def robustness_filter(piece: Piece, cfg: FilterConfig = FilterConfig()) -> Piece:
    """Compress latency-sensitive velocities toward their local mean.

    An event is flagged when the velocity spread (max - min) inside its
    +-window/2 neighbourhood exceeds the threshold: that is the condition
    under which differential latency scrambles local event order. Timing is
    untouched; neighbourhood statistics use the original velocities.
    """
    onsets = piece.onsets()
    velocities = piece.velocities().astype(float)
    half = cfg.window / 2.0
    out = []
    lo = np.searchsorted(onsets, onsets - half, side="left")
    hi = np.searchsorted(onsets, onsets + half, side="right")
    for i, e in enumerate(piece.events):
        neigh = velocities[lo[i]:hi[i]]
        if neigh.max() - neigh.min() > cfg.spread_threshold:
            mean = neigh.mean()
            new_v = int(np.clip(round(mean + cfg.gamma * (e.velocity - mean)),
                                0, VELOCITY_MAX))
            out.append(replace(e, velocity=new_v))
        else:
            out.append(e)
    return piece.with_events(out)


# ---------------------------------------------------------------------------
# Calibration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CalibrationData:
    velocities: tuple[float, ...]
    latencies_ms: tuple[float, ...]

    def __post_init__(self):
        if len(self.velocities) != len(self.latencies_ms):
            raise ValueError("velocity/latency lengths differ")
        if any(not 0 <= v <= VELOCITY_MAX for v in self.velocities):
            raise ValueError("calibration velocities outside the 10-bit range")
        if any(l <= 0 for l in self.latencies_ms):
            raise ValueError("latencies must be positive")

    @staticmethod
    def from_csv(path) -> "CalibrationData":
        vs, ls = [], []
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            for row in reader:
                vs.append(float(row["velocity"]))
                ls.append(float(row["latency_ms"]))
        return CalibrationData(tuple(vs), tuple(ls))

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["velocity", "latency_ms"])
            writer.writerows(zip(self.velocities, self.latencies_ms))


@dataclass(frozen=True)
class PowerLawFit:
    model: LatencyModel
    rmse_ms: float


def fit_power_law(data: CalibrationData, fit_bounds: bool = False,
                  l_max: float = 30.0, l_min: float = 10.0) -> PowerLawFit:
    """Least-squares power-law exponent (optionally also the latency bounds).

    The fitted RMSE is reported as-is; a poor fit on non-power-law data is
    visible, not hidden.
    """
    v = np.asarray(data.velocities, dtype=float)
    y = np.asarray(data.latencies_ms, dtype=float)
    if np.unique(v).size < 3:
        raise FitError("calibration needs >= 3 distinct velocities")
    u = v / VELOCITY_MAX

    if fit_bounds:
        def curve(u_, c, lmax, lmin):
            return lmax - (lmax - lmin) * u_**c
        p0 = (0.5, l_max, l_min)
        popt, _ = optimize.curve_fit(curve, u, y, p0=p0,
                                     bounds=([0.01, 1.0, 0.1], [0.99, 100.0, 50.0]))
        c_hat, l_max, l_min = (float(x) for x in popt)
        pred = curve(u, *popt)
    else:
        def sse(c):
            pred = l_max - (l_max - l_min) * u**c
            return float(np.sum((pred - y) ** 2))
        res = optimize.minimize_scalar(sse, bounds=(0.01, 0.99), method="bounded",
                                       options={"xatol": 1e-8})
        c_hat = float(res.x)
        pred = l_max - (l_max - l_min) * u**c_hat
    rmse = float(np.sqrt(np.mean((pred - y) ** 2)))
    model = LatencyModel(variant="power", l_max=l_max, l_min=l_min, c=c_hat)
    return PowerLawFit(model, rmse)


# ---------------------------------------------------------------------------
# Constraint enforcement
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConstraintSet:
    velocity_range: tuple[int, int] = (0, VELOCITY_MAX)
    min_key_ioi: float = KEY_RESET_WINDOW
    latency_bounds_ms: tuple[float, float] = (10.0, 30.0)
    max_polyphony: int = 88
    scan_resolution: float = 0.001

    def __post_init__(self):
        if self.min_key_ioi <= 0 or self.scan_resolution <= 0 or self.max_polyphony <= 0:
            raise ValueError("constraint fields must be positive")


@dataclass(frozen=True)
class Violation:
    reason: str       # "velocity range" | "per-key rate" | "polyphony"
    onset: float
    pitch: int
    action: str


def enforce_constraints(piece: Piece, cs: ConstraintSet = ConstraintSet()):
    """Repair a piece against the hardware inequalities; report every change.

    Repair order matters and is fixed: velocity clamp, then the per-key
    collision mask, then the simultaneity cap (lowest velocities dropped
    beyond the key count).
    """
    report: list[Violation] = []
    lo, hi = cs.velocity_range

    clamped = []
    for e in piece.events:
        if e.velocity < lo or e.velocity > hi:
            report.append(Violation("velocity range", e.onset, e.pitch,
                                    f"clamped {e.velocity} to [{lo}, {hi}]"))
            e = replace(e, velocity=int(np.clip(e.velocity, lo, hi)))
        clamped.append(e)

    last_kept: dict[int, float] = {}
    masked = []
    for e in sorted(clamped, key=lambda ev: (ev.onset, ev.voice, ev.pitch)):
        prev = last_kept.get(e.pitch)
        # nanosecond tolerance: events at exactly the reset limit are legal
        if prev is not None and e.onset - prev < cs.min_key_ioi - 1e-9:
            report.append(Violation("per-key rate", e.onset, e.pitch,
                                    f"dropped; {e.onset - prev:.4f}s after previous strike"))
            continue
        masked.append(e)
        last_kept[e.pitch] = e.onset

    kept: list[NoteEvent] = []
    cluster: list[NoteEvent] = []

    def flush():
        if not cluster:
            return
        if len(cluster) <= cs.max_polyphony:
            kept.extend(cluster)
            return
        by_velocity = sorted(cluster, key=lambda ev: (-ev.velocity, ev.pitch))
        kept.extend(by_velocity[:cs.max_polyphony])
        for e in by_velocity[cs.max_polyphony:]:
            report.append(Violation("polyphony", e.onset, e.pitch,
                                    f"dropped; {len(cluster)} simultaneous notes"))

    for e in masked:
        if cluster and e.onset - cluster[-1].onset >= cs.scan_resolution:
            flush()
            cluster = []
        cluster.append(e)
    flush()

    return piece.with_events(kept), report


# ---------------------------------------------------------------------------
# Mismatch simulation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NoiseSpec:
    multiplicative: float = 0.0   # +-fraction, uniform per note
    additive_ms: float = 0.0      # +-ms, uniform per note
    exponent_drift: float = 0.0   # bounded random-walk step for the true exponent


@dataclass(frozen=True)
class MismatchResult:
    uncorrected_ms: np.ndarray    # per-trial jitter SD without compensation
    corrected_ms: np.ndarray      # per-trial jitter SD with the assumed model
    p_value: float                # paired t test, corrected vs uncorrected

    @property
    def uncorrected_mean(self) -> float:
        return float(self.uncorrected_ms.mean())

    @property
    def corrected_mean(self) -> float:
        return float(self.corrected_ms.mean())


def _true_latencies(velocities, true_model: LatencyModel, noise: NoiseSpec, rng):
    v = np.asarray(velocities, dtype=float)
    if noise.exponent_drift > 0:
        steps = rng.uniform(-noise.exponent_drift, noise.exponent_drift, v.size)
        c_path = np.clip(true_model.c + np.cumsum(steps), 0.35, 0.65)
        u = v / true_model.v_max
        base = true_model.l_max - (true_model.l_max - true_model.l_min) * u**c_path
    else:
        base = latency(true_model, v)
    if noise.multiplicative > 0:
        base = base * (1.0 + rng.uniform(-noise.multiplicative, noise.multiplicative, v.size))
    if noise.additive_ms > 0:
        base = base + rng.uniform(-noise.additive_ms, noise.additive_ms, v.size)
    return base


def simulate_mismatch(velocities, assumed: LatencyModel, true_model: LatencyModel,
                      noise: NoiseSpec = NoiseSpec(), trials: int = 50,
                      rng: np.random.Generator | None = None) -> MismatchResult:
    """Onset-jitter SD with and without compensation when the true latency law
    deviates from the assumed one, over seeded trials.

    Jitter is the standard deviation of (actual - intended) onset error in ms;
    uncompensated error is the true latency itself, compensated error is the
    residual after subtracting the assumed model's prediction.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = rng if rng is not None else np.random.default_rng(0)
    v = np.asarray(velocities, dtype=float)
    assumed_ms = latency(assumed, v)
    raw = np.empty(trials)
    hal = np.empty(trials)
    for t in range(trials):
        actual = _true_latencies(v, true_model, noise, rng)
        raw[t] = actual.std()
        hal[t] = (actual - assumed_ms).std()
    if trials >= 2 and not np.allclose(raw, hal):
        p = float(sps.ttest_rel(hal, raw).pvalue)
    else:
        p = float("nan")
    return MismatchResult(raw, hal, p)


def model_from_config(cfg: dict) -> LatencyModel:
    return LatencyModel(
        variant=cfg.get("variant", "power"),
        l_max=float(cfg.get("l_max", 30.0)),
        l_min=float(cfg.get("l_min", 10.0)),
        c=float(cfg.get("c", 0.5)),
        k=float(cfg.get("k", 9.0)),
    )


def model_to_config(m: LatencyModel) -> dict:
    return {"variant": m.variant, "l_max": m.l_max, "l_min": m.l_min, "c": m.c, "k": m.k}
