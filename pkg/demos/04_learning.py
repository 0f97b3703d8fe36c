"""Train a Q-network controller on the layered two-heuristic domain and
compare it with the witness (optimal), alternation, and single-heuristic
baselines.  Small scale so it finishes in well under a minute; the
acceptance suite runs the full desk-scale version.

Run:  python demos/04_learning.py
"""

from dacsearch import (
    AlternationPolicy,
    ScriptedPolicy,
    SinglePolicy,
    TrainConfig,
    evaluate_policy,
    gen_artificial,
    make_portfolio,
    run_gbfs,
    train,
)
from dacsearch.search import Budget

DEPTH, BRANCHING, CUTOFF = 30, 3, 2_000
train_tasks = [gen_artificial(DEPTH, BRANCHING, seed).task for seed in range(15)]
held = [gen_artificial(DEPTH, BRANCHING, 200 + seed) for seed in range(8)]


def held_out_mean(policy_for_instance):
    total = 0
    for inst in held:
        result = run_gbfs(
            inst.task, make_portfolio(inst.task), policy_for_instance(inst),
            Budget(max_expansions=CUTOFF),
        )
        total += result.expansions
    return total / len(held)


print("baselines (mean expansions on held-out instances):")
print(f"  optimal witness : {held_out_mean(lambda i: ScriptedPolicy(i.witness)):6.1f}")
print(f"  alternation     : {held_out_mean(lambda i: AlternationPolicy((0, 1))):6.1f}")
print(f"  single 0        : {held_out_mean(lambda i: SinglePolicy(0)):6.1f}")
print(f"  single 1        : {held_out_mean(lambda i: SinglePolicy(1)):6.1f}")

config = TrainConfig(
    total_updates=30_000,
    epsilon_decay_steps=10_000,
    eval_interval=5_000,
    episode_cutoff=CUTOFF,
    seed=0,
)
print(f"\ntraining: {config.total_updates} updates on {len(train_tasks)} instances ...")
result = train(train_tasks, config)
print("learning curve (training-set mean expansions per evaluation):")
for point in result.curve:
    marker = "  <- new incumbent" if point.incumbent_updated else ""
    print(f"  after {point.update_step:>6} updates: {point.mean_expansions:7.1f}{marker}")

coverage, _, mean = evaluate_policy(
    result.policy(),
    [inst.task for inst in held],
    [make_portfolio(inst.task) for inst in held],
    CUTOFF,
)
print(f"\nlearned controller on held-out instances: mean {mean:.1f}, coverage {coverage:.0%}")
print("(the witness solves them in exactly "
      f"{DEPTH} expansions; alternation wastes a step on ~half the layers)")
