"""Greedy best-first search with one open list per portfolio heuristic.

Every generated state is evaluated with *all* heuristics and inserted
into every open list where its value is finite, so search progress is
shared across the lists.  At each expansion step a control policy picks
the list to pop from; the popped state is goal-tested before expansion,
so ``expansions`` counts exactly the non-goal expansions until a plan is
found.

A search is strictly single-threaded and, given a task, portfolio,
seeded policy, and budget, fully deterministic: reruns produce identical
results including the step-by-step trace.  (Wall-clock time is recorded
for reporting but is measurement, not search state.)
"""

from __future__ import annotations

import itertools
import json
import time
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .features import compute_features, feature_diff, num_features, step_reward
from .openlists import OpenList
from .tasks import INF, Task, validate_plan

RUNNING = "running"
PLAN_FOUND = "plan-found"
EXHAUSTED = "exhausted"
BUDGET_EXCEEDED = "budget-exceeded"


class SearchAborted(Exception):
    """Raised by a policy to abort the search with a specific outcome."""

    def __init__(self, outcome: str, message: str = ""):
        self.outcome = outcome
        super().__init__(message or outcome)


@dataclass
class Budget:
    max_expansions: Optional[int] = None
    max_seconds: Optional[float] = None


@dataclass
class SearchNode:
    """Registry record of a generated state."""

    state: object
    parent: object  # predecessor state, None for the initial state
    op: Optional[int]  # operator index that generated this state
    h_values: tuple
    expanded: bool = False


@dataclass(frozen=True)
class TraceStep:
    t: int
    chosen: int
    diff: tuple
    reward: float


@dataclass
class SearchResult:
    outcome: str
    plan: Optional[list[int]]
    cost: Optional[int]
    expansions: int
    generated: int
    trace: list[TraceStep]
    wall_time: float

    def summary_json(self) -> str:
        return json.dumps(
            {
                "outcome": self.outcome,
                "expansions": self.expansions,
                "generated": self.generated,
                "cost": self.cost,
                "wall_time_ms": round(self.wall_time * 1000.0, 3),
            },
            sort_keys=True,
        )

    def trace_csv(self, n_heuristics: int) -> str:
        """One row per expansion step: t, chosen list, reward, 5n stat diffs."""
        names = []
        for i in range(n_heuristics):
            names += [f"h{i}_dmax", f"h{i}_dmin", f"h{i}_dmu", f"h{i}_dvar", f"h{i}_dcount"]
        lines = ["t,chosen_h,reward," + ",".join(names)]
        for step in self.trace:
            stats = ",".join(repr(x) for x in step.diff[:-1])
            lines.append(f"{step.t},{step.chosen},{step.reward},{stats}")
        return "\n".join(lines) + "\n"

    def fingerprint(self) -> bytes:
        """Deterministic byte serialization of the search-relevant content.

        Excludes wall-clock time, which varies between identical runs.
        """
        payload = {
            "outcome": self.outcome,
            "plan": self.plan,
            "cost": self.cost,
            "expansions": self.expansions,
            "generated": self.generated,
            "trace": [
                (s.t, s.chosen, s.reward, tuple(repr(x) for x in s.diff)) for s in self.trace
            ],
        }
        return json.dumps(payload, sort_keys=True).encode("utf-8")


class GbfsRun:
    """One stepwise search episode.

    Drive it either through :func:`run_gbfs` with a policy, or manually:
    check :meth:`status`, read :attr:`features`/:attr:`diff`, call
    :meth:`step` with a list index.  ``step`` returns True if it expanded
    a state and False if it terminated the run (goal popped).
    """

    def __init__(self, task: Task, portfolio: Sequence, budget: Optional[Budget] = None):
        if not portfolio:
            raise ValueError("portfolio must not be empty")
        self.task = task
        self.portfolio = list(portfolio)
        self.budget = budget or Budget()
        if self.budget.max_expansions is not None and self.budget.max_expansions < 0:
            raise ValueError("expansion budget must be >= 0")
        self.n = len(self.portfolio)
        self.lists = [OpenList() for _ in range(self.n)]
        self.nodes: dict = {}
        self._seq = itertools.count()
        self.t = 0
        self.expansions = 0
        self.generated = 0
        self.trace: list[TraceStep] = []
        self._outcome = RUNNING
        self._plan: Optional[list[int]] = None
        self._cost: Optional[int] = None
        self._start = time.perf_counter()
        self._wall_time = 0.0
        root = task.initial_state()
        self._insert(root, parent=None, op=None)
        self.features = compute_features(self.lists, 0)
        self.diff = feature_diff(self.features, self.features)  # zero diff at t=0

    # -- bookkeeping -------------------------------------------------------

    def _insert(self, state, parent, op) -> None:
        h_values = tuple(h.evaluate(state) for h in self.portfolio)
        self.generated += 1
        self.nodes[state] = SearchNode(state, parent, op, h_values)
        for i, value in enumerate(h_values):
            if value != INF:
                self.lists[i].push(value, next(self._seq), state)

    def _is_stale(self, state) -> bool:
        return self.nodes[state].expanded

    def _finish(self, outcome: str, plan: Optional[list[int]] = None) -> None:
        self._outcome = outcome
        self._plan = plan
        self._cost = validate_plan(self.task, plan) if plan is not None else None
        self._wall_time = time.perf_counter() - self._start

    # -- driving -------------------------------------------------------------

    def status(self) -> str:
        """Settle and return the run status (RUNNING or a final outcome)."""
        if self._outcome != RUNNING:
            return self._outcome
        if not any(ol.has_live(self._is_stale) for ol in self.lists):
            self._finish(EXHAUSTED)
            return self._outcome
        b = self.budget
        if b.max_expansions is not None and self.expansions >= b.max_expansions:
            self._finish(BUDGET_EXCEEDED)
            return self._outcome
        if b.max_seconds is not None and time.perf_counter() - self._start > b.max_seconds:
            self._finish(BUDGET_EXCEEDED)
            return self._outcome
        return RUNNING

    def step(self, action: int) -> bool:
        """Pop from the requested list (cyclic fallback) and expand.

        Returns True if a state was expanded; False if the popped state
        was a goal, which ends the run with a reconstructed plan.
        """
        if self._outcome != RUNNING:
            raise RuntimeError(f"step() after termination ({self._outcome})")
        if not 0 <= action < self.n:
            raise ValueError(f"policy selected list {action}, portfolio has {self.n}")
        chosen = None
        popped = None
        for k in range(self.n):
            i = (action + k) % self.n
            entry = self.lists[i].pop(self._is_stale)
            if entry is not None:
                chosen = i
                popped = entry
                break
        if popped is None:
            self._finish(EXHAUSTED)
            return False
        _, state = popped
        if self.task.is_goal(state):
            self._finish(PLAN_FOUND, self._reconstruct(state))
            return False
        self._expand(state, chosen)
        return True

    def _expand(self, state, chosen: int) -> None:
        node = self.nodes[state]
        node.expanded = True
        for i, value in enumerate(node.h_values):
            if value != INF:
                self.lists[i].stats.remove(value)
        for op_idx, succ in self.task.successors(state):
            if succ not in self.nodes:
                self._insert(succ, parent=state, op=op_idx)
        self.trace.append(TraceStep(self.t, chosen, self.diff, step_reward()))
        self.expansions += 1
        self.t += 1
        prev = self.features
        self.features = compute_features(self.lists, self.t)
        self.diff = feature_diff(prev, self.features)

    def _reconstruct(self, state) -> list[int]:
        plan = []
        node = self.nodes[state]
        while node.parent is not None:
            plan.append(node.op)
            node = self.nodes[node.parent]
        plan.reverse()
        return plan

    def result(self) -> SearchResult:
        if self._outcome == RUNNING:
            raise RuntimeError("search still running")
        return SearchResult(
            outcome=self._outcome,
            plan=self._plan,
            cost=self._cost,
            expansions=self.expansions,
            generated=self.generated,
            trace=self.trace,
            wall_time=self._wall_time,
        )

    def abort(self, outcome: str) -> None:
        self._finish(outcome)

    def feature_len(self) -> int:
        return num_features(self.n)


def run_gbfs(task: Task, portfolio: Sequence, policy, budget: Optional[Budget] = None) -> SearchResult:
    """Run one greedy best-first search episode under a control policy.

    The loop per step: compute features and their diff, let the policy
    select a list, pop its minimum (value, seq) entry skipping stale
    states, goal-test the popped state, and otherwise expand it --
    evaluating each new state with every heuristic and inserting it into
    every list with a finite value.
    """
    run = GbfsRun(task, portfolio, budget)
    policy.reset()
    try:
        while run.status() == RUNNING:
            action = policy.select(run.t, run.features, run.diff)
            run.step(action)
    except SearchAborted as abort:
        run.abort(abort.outcome)
    result = run.result()
    policy.on_episode_end(run.t, run.diff, result.outcome)
    return result
