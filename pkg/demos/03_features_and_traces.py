"""What a control policy actually sees: open-list statistics, their
step-to-step diffs, and the per-step trace the search emits.

Run:  python demos/03_features_and_traces.py
"""

from dacsearch import (
    AlternationPolicy,
    gen_pi_n,
    make_portfolio,
    run_gbfs,
    switch_frequency,
    usage_quarters,
)
from dacsearch.search import RUNNING, GbfsRun

task = gen_pi_n(8)
portfolio = make_portfolio(task)

# Stepwise driving exposes the features before each decision: for each
# heuristic list (max, min, mean, variance, count), then the step t.
run = GbfsRun(task, portfolio)
print("features per step (list 0 block | list 1 block | t):")
while run.status() == RUNNING and run.t < 4:
    f = run.features
    print(f"  t={run.t}: {f[0:5]} | {f[5:10]} | {f[10]}")
    run.step(run.t % 2)  # alternate by hand

# Full runs record a trace: one row per expansion with the feature diff.
result = run_gbfs(task, portfolio, AlternationPolicy((1, 0)))
print(f"\nalternation run: {result.expansions} expansions, outcome {result.outcome}")
print("first trace rows as CSV:")
for line in result.trace_csv(len(portfolio)).splitlines()[:4]:
    print("  " + line)

selections = [step.chosen for step in result.trace]
print("\nheuristic usage per quarter of the run:")
for q, row in enumerate(usage_quarters(selections, len(portfolio))):
    print(f"  Q{q + 1}: {[round(x, 2) for x in row]}")
print("switching-frequency classes (fraction of steps):")
for cls, mass in switch_frequency(selections).items():
    print(f"  {cls:<10} {mass:.3f}")
print("\nsummary:", result.summary_json())
