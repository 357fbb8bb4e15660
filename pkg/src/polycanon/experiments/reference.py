"""Target-value registry for the experiment harness.

Every report row carries an anchor key into this registry; the reporting
linter rejects rows without one. Entries define how a measured value is
scored: exact match, absolute tolerance, interval, one-sided bound, or
informational (recorded, never gating).
"""

from __future__ import annotations

# kinds: equals | approx (value, atol) | range (lo, hi) | at_least | at_most | info

REFERENCE: dict[str, dict] = {
    # Layer-1 grammar and sequence measures
    "grammar.depth4.text": {"kind": "equals", "value": "ABAABABA"},
    "grammar.lengths.fibonacci": {"kind": "equals", "value": True},
    "grammar.counts.depth4": {"kind": "equals", "value": (5, 3)},
    "grammar.counts.depth5": {"kind": "equals", "value": (8, 5)},
    "grammar.counts.depth6": {"kind": "equals", "value": (13, 8)},
    "grammar.counts.depth7": {"kind": "equals", "value": (21, 13)},
    "sequence.ir.depth4": {"kind": "approx", "value": 0.522, "atol": 1e-3},
    "sequence.ir.depth5": {"kind": "approx", "value": 0.344, "atol": 1e-3},
    "sequence.ir.depth6": {"kind": "approx", "value": 0.420, "atol": 1e-3},
    "sequence.ir.depth7": {"kind": "approx", "value": 0.357, "atol": 1e-3},
    "sequence.lz.depth4": {"kind": "equals", "value": 5},
    "sequence.lz.depth5": {"kind": "equals", "value": 6},
    "sequence.lz.depth6": {"kind": "equals", "value": 7},
    "sequence.lz.depth7": {"kind": "equals", "value": 8},
    "sequence.det.depth4": {"kind": "approx", "value": 0.692, "atol": 1e-3},
    "sequence.det.depth6": {"kind": "approx", "value": 0.764, "atol": 1e-3},
    "sequence.det.depth8": {"kind": "approx", "value": 0.781, "atol": 1e-3},
    "sequence.ir.depth7.permutation_p": {"kind": "at_most", "value": 1e-3},
    "sequence.ir.depth6.permutation_p": {"kind": "at_most", "value": 0.01},
    "sequence.det.depth8.permutation_p": {"kind": "range", "lo": 0.012, "hi": 0.052},
    "sequence.ir.shuffled_mean.depth4": {"kind": "info"},
    "sequence.lz.shuffled_mean.depth4": {"kind": "info"},
    "sequence.nlz.depth_weighted_lower": {"kind": "equals", "value": True},
    "sequence.nlz.values": {"kind": "info"},

    # Pipeline fidelity
    "fidelity.n_events": {"kind": "range", "lo": 4200, "hi": 5100},
    "fidelity.density.a": {"kind": "range", "lo": 30.0, "hi": 40.0},
    "fidelity.density.b": {"kind": "range", "lo": 105.0, "hi": 135.0},
    "fidelity.rc.gap": {"kind": "at_least", "value": 0.10},
    "fidelity.rc.d": {"kind": "at_least", "value": 2.0},
    "fidelity.mc.gap": {"kind": "at_least", "value": 0.08},
    "fidelity.mc.d": {"kind": "at_least", "value": 2.0},
    "fidelity.ts.u_min": {"kind": "equals", "value": 0.0},
    "fidelity.ts.p": {"kind": "approx", "value": 0.036, "atol": 0.005},
    "fidelity.velocity.u_min": {"kind": "equals", "value": 0.0},
    "fidelity.velocity.d_undefined": {"kind": "equals", "value": True},
    "fidelity.pitch_separation": {"kind": "at_least", "value": 5.0},
    "fidelity.rc.same": {"kind": "info"},
    "fidelity.rc.cross": {"kind": "info"},
    "fidelity.mc.same": {"kind": "info"},
    "fidelity.mc.cross": {"kind": "info"},

    # Per-layer degradation
    "degradation.ks_max": {"kind": "at_most", "value": 0.15},
    "degradation.pitch_ks_max": {"kind": "at_most", "value": 0.03},
    "degradation.ioi_peak_increment_layer": {"kind": "equals", "value": "L3"},
    "degradation.table": {"kind": "info"},

    # Ablations
    "ablation_a.ir.full": {"kind": "approx", "value": 0.522, "atol": 1e-3},
    "ablation_a.ir.shuffled_mean": {"kind": "info"},
    "ablation_a.ir.permutation_p": {"kind": "at_most", "value": 0.15},
    "ablation_a.mc.z": {"kind": "info"},
    "ablation_a.rc.z": {"kind": "info"},
    "ablation_b.vss_temporal.drop_pct": {"kind": "at_least", "value": 50.0},
    "ablation_b.vss_temporal.separation": {"kind": "equals", "value": True},
    "ablation_b.vss_temporal.abs_r": {"kind": "approx", "value": 1.0, "atol": 1e-9},
    "ablation_b.vss_temporal.full": {"kind": "info"},
    "ablation_c.coupling.linear": {"kind": "at_least", "value": 0.99},
    "ablation_c.coupling.power": {"kind": "at_least", "value": 0.99},
    "ablation_c.coupling.compensated": {"kind": "at_most", "value": 0.05},
    "ablation_c.onset_sd.uncompensated": {"kind": "info"},
    "ablation_c.onset_sd.compensated": {"kind": "approx", "value": 0.0, "atol": 1e-9},

    # Canon / convergence
    "canon.rational.count": {"kind": "equals", "value": 11},
    "canon.transcendental.counts": {"kind": "equals", "value": (5, 11, 26, 51)},
    "canon.transcendental.monotone": {"kind": "equals", "value": True},
    "canon.transcendental.epsilon_correlation": {"kind": "at_least", "value": 0.99},
    "cp.discrete.density.u_extreme": {"kind": "equals", "value": True},
    "cp.discrete.density.abs_r": {"kind": "approx", "value": 1.0, "atol": 1e-9},
    "cp.discrete.ts.u_extreme": {"kind": "equals", "value": True},
    "cp.discrete.post_density": {"kind": "at_least", "value": 30.0},
    "cp.discrete.pre_density": {"kind": "info"},
    "cp.discrete.cp_time": {"kind": "info"},
    "cp.discrete.null_switch_p": {"kind": "at_least", "value": 0.05},
    "cp.continuous.tracking_r": {"kind": "at_least", "value": 0.8},
    "cp.continuous.contrast_ratio": {"kind": "at_least", "value": 3.0},
    "cp.continuous.n_events": {"kind": "info"},

    # Density / saturation
    "saturation.reference.breakpoint": {"kind": "range", "lo": 27.0, "hi": 31.0},
    "saturation.reference.r2_piecewise": {"kind": "at_least", "value": 0.95},
    "saturation.reference.r2_gap": {"kind": "at_least", "value": 0.3},
    "saturation.reference.slope_ratio": {"kind": "at_least", "value": 40.0},
    "saturation.reference.ci": {"kind": "equals", "value": True},
    "saturation.reference.ci_bounds": {"kind": "info"},
    "saturation.sweep.ts_band": {"kind": "equals", "value": True},
    "saturation.sweep.ts_spearman": {"kind": "at_most", "value": -0.95},
    "saturation.sweep.breakpoint": {"kind": "info"},
    "saturation.sweep.coherence": {"kind": "info"},
    "null.ts_max": {"kind": "at_most", "value": 0.05},
    "null.band_test_p": {"kind": "at_most", "value": 0.05},
    "null.mc_profile": {"kind": "info"},
    "independence.mc_at_30": {"kind": "at_most", "value": 0.2},
    "independence.mc_at_10": {"kind": "at_least", "value": 0.35},
    "independence.drop": {"kind": "at_least", "value": 0.15},

    # Constraint engineering / separation
    "constraints.vss_ratio": {"kind": "at_least", "value": 10.0},
    "constraints.kruskal_p": {"kind": "at_most", "value": 1e-6},
    "constraints.coupling_r": {"kind": "at_least", "value": 0.999},
    "constraints.vss_baseline": {"kind": "info"},
    "constraints.vss_stratified": {"kind": "info"},
    "constraints.ts_change_pitch_only": {"kind": "info"},
    "constraints.pcs_distance": {"kind": "range", "lo": 0.0, "hi": 1.0},
    "wvss.velocity_weight": {"kind": "at_least", "value": 0.80},
    "wvss.split_half.deviation_pp": {"kind": "at_most", "value": 5.0},
    "wvss.split_half.correlation": {"kind": "at_least", "value": 0.99},
    "wvss.transfer.temporal_low_gt_high": {"kind": "equals", "value": True},
    "wvss.weights": {"kind": "info"},

    # Hardware abstraction layer
    "hal.boundary.l0": {"kind": "approx", "value": 30.0, "atol": 1e-9},
    "hal.boundary.lmax_velocity": {"kind": "approx", "value": 10.0, "atol": 1e-9},
    "hal.max_linear_power_gap": {"kind": "approx", "value": 5.0, "atol": 1e-3},
    "hal.max_linear_power_gap.velocity": {"kind": "range", "lo": 255, "hi": 257},
    "hal.residual.c03": {"kind": "approx", "value": 1.0446, "atol": 0.10446},
    "hal.residual.c04": {"kind": "approx", "value": 0.4769, "atol": 0.04769},
    "hal.residual.c05": {"kind": "approx", "value": 0.0, "atol": 1e-9},
    "hal.residual.c06": {"kind": "approx", "value": 0.4015, "atol": 0.04015},
    "hal.residual.c07": {"kind": "approx", "value": 0.7404, "atol": 0.07404},
    "hal.residual.minimal_at_calibrated": {"kind": "equals", "value": True},
    "hal.residual.monotone": {"kind": "equals", "value": True},
    "mismatch.hal_beats_raw": {"kind": "equals", "value": True},
    "mismatch.suppression_at_20pct": {"kind": "at_least", "value": 70.0},
    "mismatch.table": {"kind": "info"},
    "virtual_piano.hal_fraction": {"kind": "at_most", "value": 0.40},
    "virtual_piano.paired_p": {"kind": "at_most", "value": 1e-3},
    "virtual_piano.jitter": {"kind": "info"},
    "filter.uncalibrated_sd_reduced_p": {"kind": "at_most", "value": 0.01},
    "filter.calibrated_error_increases": {"kind": "equals", "value": True},
    "filter.values": {"kind": "info"},

    # Beyond-human demonstrations
    "beyond.polyphony.chord_size": {"kind": "equals", "value": 40},
    "beyond.polyphony.grid_error": {"kind": "approx", "value": 0.0, "atol": 1e-12},
    "beyond.trill.rate_hz": {"kind": "approx", "value": 30.0, "atol": 1e-9},
    "beyond.trill.per_key_hz": {"kind": "at_most", "value": 20.0},
    "beyond.trill.single_key_rejected": {"kind": "equals", "value": True},
    "beyond.arpeggio.count": {"kind": "equals", "value": 72},
    "beyond.arpeggio.grid_error": {"kind": "approx", "value": 0.0, "atol": 1e-12},
    "beyond.section_contrast_p": {"kind": "at_most", "value": 1e-10},
}


def evaluate(anchor: str, value) -> tuple[bool, str]:
    """Score a measured value against its registry entry -> (passed, expected)."""
    spec = REFERENCE[anchor]
    kind = spec["kind"]
    if kind == "info":
        return True, "(informational)"
    if kind == "equals":
        target = spec["value"]
        return value == target, f"== {target}"
    if kind == "approx":
        target, atol = spec["value"], spec["atol"]
        ok = value == value and abs(value - target) <= atol  # NaN fails
        return ok, f"= {target} +- {atol:g}"
    if kind == "range":
        return spec["lo"] <= value <= spec["hi"], f"in [{spec['lo']}, {spec['hi']}]"
    if kind == "at_least":
        return value >= spec["value"], f">= {spec['value']}"
    if kind == "at_most":
        return value <= spec["value"], f"<= {spec['value']}"
    raise ValueError(f"unknown reference kind {kind!r}")
