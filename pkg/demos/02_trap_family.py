"""The exponential separation between search-state-aware control and
time-only control, reproduced with exact expansion counts.

The trap family has one two-step goal path and a trap state whose
cluster of 2^(n-2) successors looks best to both heuristics once
entered.  A policy that reads the open-list statistics (argmin of the
mean value) sidesteps the trap; fixed and alternating policies fall in
on their adversarial heuristic orientation.

Run:  python demos/02_trap_family.py
"""

from dacsearch import (
    AlternationPolicy,
    ArgminMuPolicy,
    SinglePolicy,
    gen_pi_n,
    gen_pi_prime_n,
    make_portfolio,
    run_gbfs,
    swap_heuristic_tables,
)

print(f"{'n':>3} {'cluster':>8} | {'argmin-mu':>9} | "
      f"{'single:0':>8} {'single:1':>8} {'alt:01':>8} {'alt:10':>8}  (worst orientation)")
for n in (6, 8, 10, 12):
    base = gen_pi_n(n)
    swapped = swap_heuristic_tables(base)

    def worst(policy_factory):
        return max(
            run_gbfs(t, make_portfolio(t), policy_factory()).expansions
            for t in (base, swapped)
        )

    row = [
        run_gbfs(base, make_portfolio(base), ArgminMuPolicy()).expansions,
        worst(lambda: SinglePolicy(0)),
        worst(lambda: SinglePolicy(1)),
        worst(lambda: AlternationPolicy((0, 1))),
        worst(lambda: AlternationPolicy((1, 0))),
    ]
    print(f"{n:>3} {2**(n-2):>8} | {row[0]:>9} | "
          f"{row[1]:>8} {row[2]:>8} {row[3]:>8} {row[4]:>8}")

print("\nthe detour variant defeats both single heuristics on one task:")
task = gen_pi_prime_n(10)
for name, policy in [
    ("single:0", SinglePolicy(0)),
    ("single:1", SinglePolicy(1)),
    ("argmin-mu", ArgminMuPolicy()),
]:
    result = run_gbfs(task, make_portfolio(task), policy)
    chosen = [step.chosen for step in result.trace]
    print(f"  {name:<10} expansions={result.expansions:<6} selections={chosen[:6]}")
