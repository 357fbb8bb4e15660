"""Run a slice of the experiment registry and print the scored reports.

Every row carries an anchor into the target-value registry; `polycanon
experiment --all` runs the whole battery and exits nonzero on any gated
failure.
"""

from polycanon.experiments import ExperimentSpec, run, summarize

reports = [run(ExperimentSpec(name)) for name in
           ("lsystem_info", "epsilon_sensitivity", "hal_sensitivity", "beyond_human")]

for report in reports:
    print(report.to_text())
    print()

print(summarize(reports))
