"""Seeded experiment harness: one named experiment per study condition, each
emitting a machine-readable report scored against the target-value registry."""

from __future__ import annotations

from dataclasses import dataclass, field

from .beyond import beyond_human
from .convergence import cp_continuous, cp_discrete, epsilon_sensitivity
from .density import density_sweep, distribution_independence, null_baseline
from .fidelity import ablation_a, ablation_b, ablation_c, degradation, fidelity
from .hardware import hal_sensitivity, latency_mismatch, robustness, virtual_piano
from .lsystem_info import lsystem_info
from .reporting import Report, ReportLintError, Row
from .separation import constraints, wvss_weights

REGISTRY = {
    "fidelity": fidelity,
    "degradation": degradation,
    "ablation_a": ablation_a,
    "ablation_b": ablation_b,
    "ablation_c": ablation_c,
    "lsystem_info": lsystem_info,
    "density_sweep": density_sweep,
    "null_baseline": null_baseline,
    "distribution_independence": distribution_independence,
    "constraints": constraints,
    "wvss_weights": wvss_weights,
    "cp_discrete": cp_discrete,
    "cp_continuous": cp_continuous,
    "epsilon_sensitivity": epsilon_sensitivity,
    "hal_sensitivity": hal_sensitivity,
    "latency_mismatch": latency_mismatch,
    "virtual_piano": virtual_piano,
    "robustness": robustness,
    "beyond_human": beyond_human,
}


class UnknownExperimentError(KeyError):
    pass


@dataclass(frozen=True)
class ExperimentSpec:
    name: str
    seed: int = 42
    overrides: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.name not in REGISTRY:
            raise UnknownExperimentError(
                f"unknown experiment {self.name!r}; known: {', '.join(sorted(REGISTRY))}")


def run(spec: ExperimentSpec) -> Report:
    report = REGISTRY[spec.name](seed=spec.seed, **spec.overrides)
    report.lint()
    return report


def run_all(master_seed: int = 42, names=None, **overrides) -> list[Report]:
    """Execute the registry (or a subset); per-experiment failures are recorded
    in the reports, not raised."""
    reports = []
    for name in names or sorted(REGISTRY):
        reports.append(run(ExperimentSpec(name, master_seed, overrides)))
    return reports


def summarize(reports: list[Report]) -> str:
    lines = []
    total = passed = 0
    for r in reports:
        gated = [row for row in r.rows if row.gating]
        ok = sum(row.passed for row in gated)
        total += len(gated)
        passed += ok
        status = "PASS" if r.passed else "FAIL"
        lines.append(f"{r.name:28s} {status}  ({ok}/{len(gated)} rows)")
    lines.append(f"{'total':28s}       ({passed}/{total} rows)")
    return "\n".join(lines)


__all__ = [
    "ExperimentSpec", "REGISTRY", "Report", "Row", "ReportLintError",
    "run", "run_all", "summarize", "UnknownExperimentError",
]
