"""Task generators.

* :func:`gen_pi_n` / :func:`gen_pi_prime_n` -- the two-heuristic trap
  families on which adaptive (time-only) and single-heuristic policies
  expand an exponential state cluster while a search-state-aware policy
  reaches the goal in a constant number of expansions.
* :func:`gen_artificial` -- a layered two-heuristic domain where at each
  step exactly one heuristic points to the on-path successor; used for
  white-box learning experiments.  The generator also emits the
  informative-heuristic sequence as a witness policy.
* :func:`gen_transport` -- a small logistics-style finite-domain family
  (one vehicle, several packages) for end-to-end runs with the real
  heuristics, emitted together with a feasible witness plan.

All generators are deterministic in their parameters and seed.
"""

from __future__ import annotations

import dataclasses
import random
from dataclasses import dataclass

from .tasks import ExplicitArc, ExplicitTask, Operator, SasTask, partial_assignment


class GeneratorError(ValueError):
    pass


def _pi_family(n: int, with_detour: bool) -> ExplicitTask:
    if n < 4:
        raise GeneratorError(f"family parameter must be >= 4, got {n}")
    cluster = 2 ** (n - 2)
    # ids: s0, s1, s2 (goal), s3, [detour], cluster...
    s0, s1, s2, s3 = 0, 1, 2, 3
    detour = 4 if with_detour else None
    first_k = 5 if with_detour else 4
    num_states = first_k + cluster
    arcs = [ExplicitArc("o1", 1, s0, s1)]
    if with_detour:
        arcs.append(ExplicitArc("o2a", 1, s1, detour))
        arcs.append(ExplicitArc("o2b", 1, detour, s2))
    else:
        arcs.append(ExplicitArc("o2", 1, s1, s2))
    arcs.append(ExplicitArc("o3", 1, s0, s3))
    for k in range(cluster):
        arcs.append(ExplicitArc(f"c{first_k + k}", 1, s3, first_k + k))
    h0 = [5.0, 5.0, 0.0, 3.0]
    h1 = [6.0, 3.0, 0.0, 4.0]
    if with_detour:
        h0.append(2.0)
        h1.append(10.0)
    h0 += [1.0] * cluster
    h1 += [1.0] * cluster
    return ExplicitTask(
        num_states=num_states,
        initial=s0,
        goal_states=frozenset({s2}),
        arcs=tuple(arcs),
        heuristic_table=(tuple(h0), tuple(h1)),
    )


def gen_pi_n(n: int) -> ExplicitTask:
    """Trap family: one short goal path, one trap arc into a flat cluster.

    The unique plan is ``(o1, o2)``.  The cluster behind the trap state
    holds ``2**(n-2)`` states that both heuristics value at 1, below the
    on-path state's values, so any policy that expands the trap state
    grinds through the whole cluster first.
    """
    return _pi_family(n, with_detour=False)


def gen_pi_prime_n(n: int) -> ExplicitTask:
    """Trap family variant with an extra state spliced into the goal path.

    The detour state is valued 2 by heuristic 0 and 10 by heuristic 1,
    which makes *both* single-heuristic searches fall into the cluster,
    while a mean-value-guided policy finishes after three expansions.
    """
    return _pi_family(n, with_detour=True)


def swap_heuristic_tables(task: ExplicitTask) -> ExplicitTask:
    """The same task with the two heuristic table rows exchanged."""
    if task.num_heuristics() != 2:
        raise GeneratorError("table swap is defined for exactly two heuristics")
    return dataclasses.replace(
        task, heuristic_table=(task.heuristic_table[1], task.heuristic_table[0])
    )


@dataclass(frozen=True)
class ArtificialInstance:
    task: ExplicitTask
    witness: tuple[int, ...]  # informative list index per step
    optimal_expansions: int  # expansions of the witness policy (== depth)


def gen_artificial(depth: int, branching: int, seed: int) -> ArtificialInstance:
    """Layered domain where one heuristic per step is informative.

    One goal path ``p_0 .. p_depth``; expanding ``p_{t-1}`` generates
    ``p_t`` plus ``branching`` distractor siblings.  A per-layer coin
    picks the informative heuristic: it values ``p_t`` strictly below
    everything in its list, while the other heuristic buries ``p_t``
    above a plateau of distractor values.  Distractors arc back to their
    on-path sibling, so no state is a dead end.  Following the witness
    sequence expands exactly ``depth`` states.
    """
    if depth < 1:
        raise GeneratorError(f"depth must be >= 1, got {depth}")
    if branching < 2:
        raise GeneratorError(f"branching must be >= 2, got {branching}")
    rng = random.Random(seed)
    coins = [rng.randrange(2) for _ in range(max(0, depth - 1))]  # layers 1..depth-1
    plateau = 2.0 * depth + 8.0
    num_states = (depth + 1) + depth * branching
    h = [[0.0] * num_states, [0.0] * num_states]
    h[0][0] = h[1][0] = float(depth)
    h[0][depth] = h[1][depth] = 0.0
    arcs: list[ExplicitArc] = []

    def distractor_id(layer: int, j: int) -> int:
        return (depth + 1) + (layer - 1) * branching + j

    for layer in range(1, depth + 1):
        on_path = layer
        if layer < depth:
            informative = coins[layer - 1]
            h[informative][on_path] = float(depth - layer)
            h[1 - informative][on_path] = plateau + 2.0 + (depth - layer)
        arcs.append(ExplicitArc(f"adv{layer}", 1, layer - 1, on_path))
        for j in range(branching):
            d = distractor_id(layer, j)
            h[0][d] = plateau
            h[1][d] = plateau
            arcs.append(ExplicitArc(f"off{layer}_{j}", 1, layer - 1, d))
            arcs.append(ExplicitArc(f"back{layer}_{j}", 1, d, on_path))
    task = ExplicitTask(
        num_states=num_states,
        initial=0,
        goal_states=frozenset({depth}),
        arcs=tuple(arcs),
        heuristic_table=(tuple(h[0]), tuple(h[1])),
    )
    witness = tuple([0] + coins)  # step 0 is a free choice (single entry in both lists)
    return ArtificialInstance(task=task, witness=witness, optimal_expansions=depth)


@dataclass(frozen=True)
class TransportInstance:
    task: SasTask
    witness_plan: tuple[int, ...]


def gen_transport(locations: int, packages: int, seed: int) -> TransportInstance:
    """Logistics-style family: move a vehicle, load/unload packages.

    Variable 0 is the vehicle location; variables 1..P hold package
    positions with the extra value ``locations`` meaning "in the
    vehicle".  All location pairs are connected, every operator costs 1.
    """
    if locations < 1 or packages < 1:
        raise GeneratorError("need at least one location and one package")
    rng = random.Random(seed)
    in_vehicle = locations
    variables = (locations,) + (locations + 1,) * packages
    vehicle0 = rng.randrange(locations)
    package0 = [rng.randrange(locations) for _ in range(packages)]
    goals = [rng.randrange(locations) for _ in range(packages)]
    ops: list[Operator] = []
    op_index: dict[str, int] = {}

    def add(name: str, pre, eff):
        op_index[name] = len(ops)
        ops.append(Operator(name, partial_assignment(pre), partial_assignment(eff), 1))

    for a in range(locations):
        for b in range(locations):
            if a != b:
                add(f"move_{a}_{b}", [(0, a)], [(0, b)])
    for p in range(packages):
        var = 1 + p
        for loc in range(locations):
            add(f"load_{p}_{loc}", [(0, loc), (var, loc)], [(var, in_vehicle)])
            add(f"unload_{p}_{loc}", [(0, loc), (var, in_vehicle)], [(var, loc)])
    task = SasTask(
        variables=variables,
        initial=(vehicle0, *package0),
        operators=tuple(ops),
        goal=partial_assignment((1 + p, goals[p]) for p in range(packages)),
    )
    plan: list[int] = []
    at = vehicle0
    for p in range(packages):
        if package0[p] == goals[p]:
            continue
        if at != package0[p]:
            plan.append(op_index[f"move_{at}_{package0[p]}"])
            at = package0[p]
        plan.append(op_index[f"load_{p}_{at}"])
        if at != goals[p]:
            plan.append(op_index[f"move_{at}_{goals[p]}"])
            at = goals[p]
        plan.append(op_index[f"unload_{p}_{at}"])
    return TransportInstance(task=task, witness_plan=tuple(plan))
