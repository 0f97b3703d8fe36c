"""Heuristic evaluators.

For finite-domain tasks: goal count, h_max, h_add, and an FF-style
relaxed-plan heuristic, all over the delete relaxation (facts, once
achieved, persist).  For explicit-graph tasks: table lookups.  A
uniform-cost "perfect distance" evaluator doubles as a test oracle.

All evaluators are deterministic and side-effect free; dead ends are
reported as ``math.inf`` (a real sentinel, never a large finite number).
"""

from __future__ import annotations

import heapq
import itertools
from typing import Optional, Sequence

from .tasks import INF, ExplicitTask, SasTask, State, Task, satisfies


class HeuristicError(Exception):
    pass


class MissingTableEntryError(HeuristicError):
    """Tabular lookup hit a state without a table entry."""


class SearchBudgetExceededError(HeuristicError):
    """The exhaustive perfect-distance computation ran out of budget."""


class Heuristic:
    """Base class: a named evaluator mapping states to N0 or infinity."""

    name = "heuristic"

    def evaluate(self, state):
        raise NotImplementedError

    def __call__(self, state):
        return self.evaluate(state)


class GoalCountHeuristic(Heuristic):
    """Number of goal facts not satisfied by the state.  Always finite."""

    name = "goalcount"

    def __init__(self, task: SasTask):
        self._goal = tuple(task.goal.items())

    def evaluate(self, state: State):
        return sum(1 for var, val in self._goal if state[var] != val)


class _Relaxation:
    """Shared precomputation for the delete-relaxation heuristics.

    Facts are numbered contiguously per variable.  For each operator we
    keep its precondition facts, effect facts, and cost; for each fact the
    operators it feeds.  Exploration is a generalized Dijkstra over fact
    costs: an operator fires once all its precondition facts are settled,
    which keeps per-call work linear in total precondition size plus the
    usual heap overhead.
    """

    def __init__(self, task: SasTask):
        self.task = task
        self.offsets = []
        total = 0
        for size in task.variables:
            self.offsets.append(total)
            total += size
        self.num_facts = total
        self.op_pre: list[tuple[int, ...]] = []
        self.op_eff: list[tuple[int, ...]] = []
        self.op_cost: list[int] = []
        self.consumers: list[list[int]] = [[] for _ in range(total)]
        for idx, op in enumerate(task.operators):
            pre = tuple(self.offsets[v] + d for v, d in sorted(op.precondition.items()))
            eff = tuple(self.offsets[v] + d for v, d in sorted(op.effect.items()))
            self.op_pre.append(pre)
            self.op_eff.append(eff)
            self.op_cost.append(op.cost)
            for f in pre:
                self.consumers[f].append(idx)
        self.goal_facts = tuple(self.offsets[v] + d for v, d in sorted(task.goal.items()))

    def fact_id(self, var: int, val: int) -> int:
        return self.offsets[var] + val

    def explore(self, state: State, additive: bool):
        """Propagate fact costs from ``state`` until the queue empties.

        Returns (fact costs, best supporter per fact, operator fire order).
        ``additive=True`` combines precondition costs by sum (h_add),
        otherwise by max (h_max).  The supporter of a fact is the first
        operator to achieve its final cost in deterministic exploration
        order, which keeps the supporter graph acyclic even with zero-cost
        operators.
        """
        cost = [INF] * self.num_facts
        supporter: list[Optional[int]] = [None] * self.num_facts
        settled = [False] * self.num_facts
        unsat = [len(pre) for pre in self.op_pre]
        fire_order: list[int] = []
        heap: list[tuple[float, int]] = []
        for var, val in enumerate(state):
            f = self.offsets[var] + val
            cost[f] = 0
            heapq.heappush(heap, (0, f))

        def fire(op_idx: int):
            fire_order.append(op_idx)
            pre = self.op_pre[op_idx]
            if additive:
                base = self.op_cost[op_idx] + sum(cost[f] for f in pre)
            else:
                base = self.op_cost[op_idx] + max((cost[f] for f in pre), default=0)
            for e in self.op_eff[op_idx]:
                if base < cost[e]:
                    cost[e] = base
                    supporter[e] = op_idx
                    if not settled[e]:
                        heapq.heappush(heap, (base, e))

        for op_idx, pre in enumerate(self.op_pre):
            if not pre:
                fire(op_idx)
        while heap:
            c, f = heapq.heappop(heap)
            if settled[f] or c > cost[f]:
                continue
            settled[f] = True
            for op_idx in self.consumers[f]:
                unsat[op_idx] -= 1
                if unsat[op_idx] == 0:
                    fire(op_idx)
        return cost, supporter, fire_order

    def goal_value(self, cost: Sequence[float], additive: bool):
        values = [cost[f] for f in self.goal_facts]
        if any(v == INF for v in values):
            return INF
        if additive:
            return sum(values)
        return max(values, default=0)


class MaxHeuristic(Heuristic):
    """Fixpoint of max-cost fact propagation over the delete relaxation."""

    name = "hmax"

    def __init__(self, task: SasTask):
        self._relax = _Relaxation(task)

    def evaluate(self, state: State):
        cost, _, _ = self._relax.explore(state, additive=False)
        value = self._relax.goal_value(cost, additive=False)
        return value if value == INF else int(value)


class AdditiveHeuristic(Heuristic):
    """Fixpoint of sum-cost fact propagation over the delete relaxation."""

    name = "hadd"

    def __init__(self, task: SasTask):
        self._relax = _Relaxation(task)

    def evaluate(self, state: State):
        cost, _, _ = self._relax.explore(state, additive=True)
        value = self._relax.goal_value(cost, additive=True)
        return value if value == INF else int(value)


class FFHeuristic(Heuristic):
    """Cost of a relaxed plan extracted from additive-heuristic supporters.

    Backchains from the goal facts through each fact's best supporter and
    counts every collected operator once.  The returned plan (see
    :meth:`evaluate_with_plan`) lists the collected operators in fire
    order, which is an applicable order under delete-relaxed semantics.
    """

    name = "ff"

    def __init__(self, task: SasTask):
        self._relax = _Relaxation(task)

    def evaluate(self, state: State):
        return self.evaluate_with_plan(state)[0]

    def evaluate_with_plan(self, state: State):
        relax = self._relax
        cost, supporter, fire_order = relax.explore(state, additive=True)
        if any(cost[f] == INF for f in relax.goal_facts):
            return INF, None
        in_state = [False] * relax.num_facts
        for var, val in enumerate(state):
            in_state[relax.offsets[var] + val] = True
        needed = [f for f in relax.goal_facts if not in_state[f]]
        marked = set(needed)
        collected: set[int] = set()
        while needed:
            f = needed.pop()
            op_idx = supporter[f]
            if op_idx is None or op_idx in collected:
                continue
            collected.add(op_idx)
            for p in relax.op_pre[op_idx]:
                if not in_state[p] and p not in marked:
                    marked.add(p)
                    needed.append(p)
        rank = {op_idx: i for i, op_idx in enumerate(fire_order)}
        plan = sorted(collected, key=rank.__getitem__)
        return sum(relax.op_cost[o] for o in plan), plan


class TabularHeuristic(Heuristic):
    """Pure lookup into one row of an explicit task's heuristic table."""

    def __init__(self, task: ExplicitTask, index: int):
        if not 0 <= index < task.num_heuristics():
            raise HeuristicError(f"task has no heuristic table {index}")
        self.index = index
        self.name = f"tabular:{index}"
        self._row = task.heuristic_table[index]

    def evaluate(self, state: int):
        value = self._row[state]
        if value is None:
            raise MissingTableEntryError(f"h{self.index} has no entry for state {state}")
        return value if value == INF else int(value)


class PerfectHeuristic(Heuristic):
    """Exact cheapest-goal-distance via uniform-cost search.

    Exhaustive, so intended as a test oracle on small tasks only; raises
    :class:`SearchBudgetExceededError` past ``max_expansions`` settled
    states.
    """

    name = "perfect"

    def __init__(self, task: Task, max_expansions: int = 10**6):
        self._task = task
        self._budget = max_expansions

    def evaluate(self, state):
        task = self._task
        dist = {state: 0}
        counter = itertools.count()
        heap = [(0, next(counter), state)]
        closed = set()
        while heap:
            d, _, s = heapq.heappop(heap)
            if s in closed:
                continue
            if task.is_goal(s):
                return d
            closed.add(s)
            if len(closed) > self._budget:
                raise SearchBudgetExceededError(
                    f"perfect-distance search exceeded {self._budget} expansions"
                )
            for op_idx, succ in task.successors(s):
                nd = d + task.operator_cost(op_idx)
                if nd < dist.get(succ, INF):
                    dist[succ] = nd
                    heapq.heappush(heap, (nd, next(counter), succ))
        return INF


def resolve_heuristic(name: str, task: Task) -> Heuristic:
    """Build the evaluator named by a heuristic spec string.

    Recognized names: ``ff``, ``goalcount``, ``hmax``, ``hadd``,
    ``tabular:<index>``, ``perfect``.
    """
    if name.startswith("tabular:"):
        if not isinstance(task, ExplicitTask):
            raise HeuristicError("tabular heuristics need an explicit-graph task")
        return TabularHeuristic(task, int(name.split(":", 1)[1]))
    if name == "perfect":
        return PerfectHeuristic(task)
    if not isinstance(task, SasTask):
        raise HeuristicError(f"heuristic {name!r} needs a finite-domain task")
    classes = {
        "ff": FFHeuristic,
        "goalcount": GoalCountHeuristic,
        "hmax": MaxHeuristic,
        "hadd": AdditiveHeuristic,
    }
    if name not in classes:
        raise HeuristicError(f"unknown heuristic {name!r}")
    return classes[name](task)


DEFAULT_SAS_PORTFOLIO = ("ff", "goalcount", "hmax", "hadd")


def make_portfolio(task: Task, names: Optional[Sequence[str]] = None) -> list[Heuristic]:
    """Build the ordered heuristic portfolio for a task.

    Defaults: the four-evaluator mix above for finite-domain tasks, and
    all table rows for explicit tasks.
    """
    if names is None:
        if isinstance(task, ExplicitTask):
            names = [f"tabular:{i}" for i in range(task.num_heuristics())]
        else:
            names = DEFAULT_SAS_PORTFOLIO
    if not names:
        raise HeuristicError("portfolio must contain at least one heuristic")
    return [resolve_heuristic(n, task) for n in names]


def validate_relaxed_plan(task: SasTask, state: State, plan: Sequence[int]) -> bool:
    """Check a plan under delete-relaxed semantics from ``state``.

    Facts accumulate: an operator is applicable if its precondition facts
    have all been achieved; its effects are added to the achieved set.
    Returns True iff the plan is applicable in order and achieves every
    goal fact.
    """
    achieved = {(var, val) for var, val in enumerate(state)}
    for idx in plan:
        op = task.operators[idx]
        if not all((v, d) in achieved for v, d in op.precondition.items()):
            return False
        achieved.update(op.effect.items())
    return all((v, d) in achieved for v, d in task.goal.items())
