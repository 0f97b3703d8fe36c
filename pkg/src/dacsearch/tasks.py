"""Planning task representations.

Two task backends share one interface used by the search layer:

* :class:`SasTask` -- finite-domain planning tasks (state variables with
  finite domains, operators with partial-assignment preconditions and
  effects, a partial-assignment goal).
* :class:`ExplicitTask` -- an explicit transition graph over numbered
  states with per-state heuristic tables attached.

States of a ``SasTask`` are tuples of value indices (one per variable);
states of an ``ExplicitTask`` are plain ints.  Both are immutable and
hashable, so the search layer can use them as registry keys directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence, Union

INF = math.inf

State = tuple  # dense tuple of value indices (SasTask) -- explicit states are ints


class TaskError(Exception):
    """Malformed task definition or misuse of a task operation."""


class TaskFormatError(TaskError):
    """Parse failure in the task text format."""

    def __init__(self, line_no: Optional[int], message: str):
        self.line_no = line_no
        self.message = message
        where = f"line {line_no}: " if line_no is not None else ""
        super().__init__(f"{where}{message}")


class InapplicableOperatorError(TaskError):
    """An operator was applied in a state that violates its precondition."""


class PlanValidationError(TaskError):
    """A plan is not sequentially applicable or does not reach the goal."""

    def __init__(self, message: str, step: Optional[int] = None):
        self.step = step
        super().__init__(message)


def partial_assignment(pairs: Iterable[tuple[int, int]]) -> dict[int, int]:
    """Build a consistent partial assignment from (variable, value) pairs.

    Rejects two facts on the same variable instead of silently keeping the
    last one.
    """
    result: dict[int, int] = {}
    for var, val in pairs:
        if var in result:
            raise TaskError(f"duplicate variable {var} in partial assignment")
        result[var] = val
    return dict(sorted(result.items()))


@dataclass(frozen=True)
class Operator:
    """A named operator with precondition, effect, and non-negative cost."""

    name: str
    precondition: Mapping[int, int]
    effect: Mapping[int, int]
    cost: int = 1

    def __post_init__(self):
        if self.cost < 0:
            raise TaskError(f"operator {self.name!r} has negative cost {self.cost}")
        if not self.effect:
            raise TaskError(f"operator {self.name!r} has an empty effect")


def is_applicable(op: Operator, state: State) -> bool:
    """True iff the state satisfies every precondition fact of ``op``."""
    return all(state[var] == val for var, val in op.precondition.items())


def apply_operator(op: Operator, state: State) -> State:
    """Apply ``op`` to ``state`` and return the successor state.

    The input state is never mutated (states are tuples).
    """
    if not is_applicable(op, state):
        raise InapplicableOperatorError(
            f"operator {op.name!r} not applicable in state {state}"
        )
    values = list(state)
    for var, val in op.effect.items():
        values[var] = val
    return tuple(values)


def satisfies(state: State, assignment: Mapping[int, int]) -> bool:
    return all(state[var] == val for var, val in assignment.items())


@dataclass(frozen=True)
class SasTask:
    """Finite-domain planning task.

    ``variables`` holds the domain size of each variable; values are
    indices ``0 .. size-1``.  ``goal`` is a partial assignment.
    """

    variables: tuple[int, ...]
    initial: State
    operators: tuple[Operator, ...]
    goal: Mapping[int, int]

    def __post_init__(self):
        if not self.variables:
            raise TaskError("task needs at least one variable")
        self._check_state(self.initial, "initial state")
        self._check_assignment(self.goal, "goal")
        for op in self.operators:
            self._check_assignment(op.precondition, f"precondition of {op.name!r}")
            self._check_assignment(op.effect, f"effect of {op.name!r}")

    def _check_state(self, state: State, what: str):
        if len(state) != len(self.variables):
            raise TaskError(f"{what} has {len(state)} values, expected {len(self.variables)}")
        for var, val in enumerate(state):
            if not 0 <= val < self.variables[var]:
                raise TaskError(f"{what}: value {val} out of range for variable {var}")

    def _check_assignment(self, assignment: Mapping[int, int], what: str):
        for var, val in assignment.items():
            if not 0 <= var < len(self.variables):
                raise TaskError(f"{what}: unknown variable {var}")
            if not 0 <= val < self.variables[var]:
                raise TaskError(f"{what}: value {val} out of range for variable {var}")

    # -- search interface ------------------------------------------------

    def initial_state(self) -> State:
        return self.initial

    def is_goal(self, state: State) -> bool:
        return satisfies(state, self.goal)

    def successors(self, state: State) -> list[tuple[int, State]]:
        """All (operator index, successor) pairs, in operator-index order."""
        result = []
        for idx, op in enumerate(self.operators):
            if is_applicable(op, state):
                result.append((idx, apply_operator(op, state)))
        return result

    def operator_name(self, idx: int) -> str:
        return self.operators[idx].name

    def operator_cost(self, idx: int) -> int:
        return self.operators[idx].cost

    def num_operators(self) -> int:
        return len(self.operators)

    def apply(self, idx: int, state: State) -> State:
        return apply_operator(self.operators[idx], state)


@dataclass(frozen=True)
class ExplicitArc:
    label: str
    cost: int
    src: int
    dst: int


@dataclass(frozen=True)
class ExplicitTask:
    """Explicit transition graph with tabular heuristics.

    ``heuristic_table[i][s]`` is the value heuristic ``i`` assigns to state
    ``s`` (a non-negative number or ``math.inf``); ``None`` marks a missing
    entry, which :func:`dacsearch.heuristics.TabularHeuristic` rejects.
    Arcs are numbered globally (grouped by source state) so that a plan is
    a list of arc indices, like operator indices for ``SasTask``.
    """

    num_states: int
    initial: int
    goal_states: frozenset[int]
    arcs: tuple[ExplicitArc, ...]
    heuristic_table: tuple[tuple[Optional[float], ...], ...]
    _by_src: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.num_states < 1:
            raise TaskError("explicit task needs at least one state")
        if not 0 <= self.initial < self.num_states:
            raise TaskError("initial state id out of range")
        for s in self.goal_states:
            if not 0 <= s < self.num_states:
                raise TaskError(f"goal state id {s} out of range")
        by_src: list[list[int]] = [[] for _ in range(self.num_states)]
        for idx, arc in enumerate(self.arcs):
            if not (0 <= arc.src < self.num_states and 0 <= arc.dst < self.num_states):
                raise TaskError(f"arc {arc.label!r} endpoint out of range")
            if arc.cost < 0:
                raise TaskError(f"arc {arc.label!r} has negative cost")
            by_src[arc.src].append(idx)
        for row in self.heuristic_table:
            if len(row) != self.num_states:
                raise TaskError("heuristic table row length != number of states")
        object.__setattr__(self, "_by_src", tuple(tuple(v) for v in by_src))

    # -- search interface ------------------------------------------------

    def initial_state(self) -> int:
        return self.initial

    def is_goal(self, state: int) -> bool:
        return state in self.goal_states

    def successors(self, state: int) -> list[tuple[int, int]]:
        return [(idx, self.arcs[idx].dst) for idx in self._by_src[state]]

    def operator_name(self, idx: int) -> str:
        return self.arcs[idx].label

    def operator_cost(self, idx: int) -> int:
        return self.arcs[idx].cost

    def num_operators(self) -> int:
        return len(self.arcs)

    def apply(self, idx: int, state: int) -> int:
        arc = self.arcs[idx]
        if arc.src != state:
            raise InapplicableOperatorError(
                f"arc {arc.label!r} starts at {arc.src}, not at {state}"
            )
        return arc.dst

    def num_heuristics(self) -> int:
        return len(self.heuristic_table)


Task = Union[SasTask, ExplicitTask]


def validate_plan(task: Task, plan: Sequence[int]) -> int:
    """Check a plan and return its total cost.

    A valid plan is sequentially applicable from the initial state and its
    final state satisfies the goal.  Raises :class:`PlanValidationError`
    with the failing step index otherwise.
    """
    state = task.initial_state()
    total = 0
    for step, idx in enumerate(plan):
        if not 0 <= idx < task.num_operators():
            raise PlanValidationError(f"step {step}: unknown operator index {idx}", step)
        try:
            state = task.apply(idx, state)
        except InapplicableOperatorError as exc:
            raise PlanValidationError(f"step {step}: {exc}", step) from exc
        total += task.operator_cost(idx)
    if not task.is_goal(state):
        raise PlanValidationError("goal not reached at end of plan")
    return total


# -- text format -----------------------------------------------------------
#
# SAS tasks (header `sas 1`):
#     sas 1
#     vars K d0 d1 ... d_{K-1}
#     init v0 v1 ...
#     goal M (var val){M}
#     op NAME COST pre P (var val){P} eff Q (var val){Q}
#
# Explicit tasks (header `graph 1`):
#     graph 1
#     states N
#     init I
#     goals M i0 i1 ...
#     arc SRC LABEL COST DST
#     h HEURISTIC-INDEX STATE VALUE|inf


def _tokens(line: str) -> list[str]:
    return line.split()


def _int(tok: str, line_no: int, what: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise TaskFormatError(line_no, f"expected integer for {what}, got {tok!r}")


def _pairs(toks: list[str], count: int, line_no: int, what: str) -> list[tuple[int, int]]:
    if len(toks) < 2 * count:
        raise TaskFormatError(line_no, f"expected {count} (var val) pairs for {what}")
    pairs = []
    for i in range(count):
        pairs.append((_int(toks[2 * i], line_no, what), _int(toks[2 * i + 1], line_no, what)))
    return pairs


def parse_task(text: str) -> Task:
    """Parse a task from the line-based text format."""
    lines = [(no + 1, ln.strip()) for no, ln in enumerate(text.splitlines())]
    lines = [(no, ln) for no, ln in lines if ln]
    if not lines:
        raise TaskFormatError(None, "empty task file")
    no, header = lines[0]
    toks = _tokens(header)
    if toks == ["sas", "1"]:
        return _parse_sas(lines[1:])
    if toks == ["graph", "1"]:
        return _parse_graph(lines[1:])
    raise TaskFormatError(no, f"unknown header {header!r} (expected 'sas 1' or 'graph 1')")


def _parse_sas(lines: list[tuple[int, str]]) -> SasTask:
    variables: Optional[tuple[int, ...]] = None
    initial: Optional[tuple[int, ...]] = None
    goal: Optional[dict[int, int]] = None
    operators: list[Operator] = []
    for no, ln in lines:
        toks = _tokens(ln)
        kind = toks[0]
        if kind == "vars":
            k = _int(toks[1], no, "variable count")
            if len(toks) != 2 + k:
                raise TaskFormatError(no, f"expected {k} domain sizes")
            variables = tuple(_int(t, no, "domain size") for t in toks[2:])
            if any(d < 1 for d in variables):
                raise TaskFormatError(no, "domain sizes must be >= 1")
        elif kind == "init":
            initial = tuple(_int(t, no, "initial value") for t in toks[1:])
        elif kind == "goal":
            m = _int(toks[1], no, "goal size")
            try:
                goal = partial_assignment(_pairs(toks[2:], m, no, "goal"))
            except TaskError as exc:
                raise TaskFormatError(no, str(exc))
        elif kind == "op":
            if len(toks) < 5:
                raise TaskFormatError(no, "truncated operator line")
            name = toks[1]
            cost = _int(toks[2], no, "operator cost")
            if toks[3] != "pre":
                raise TaskFormatError(no, "expected 'pre' in operator line")
            p = _int(toks[4], no, "precondition size")
            rest = toks[5:]
            pre_pairs = _pairs(rest, p, no, "precondition")
            rest = rest[2 * p:]
            if not rest or rest[0] != "eff":
                raise TaskFormatError(no, "expected 'eff' in operator line")
            q = _int(rest[1], no, "effect size")
            eff_pairs = _pairs(rest[2:], q, no, "effect")
            if len(rest) != 2 + 2 * q:
                raise TaskFormatError(no, "trailing tokens in operator line")
            try:
                operators.append(
                    Operator(name, partial_assignment(pre_pairs), partial_assignment(eff_pairs), cost)
                )
            except TaskError as exc:
                raise TaskFormatError(no, str(exc))
        else:
            raise TaskFormatError(no, f"unknown directive {kind!r}")
    if variables is None or initial is None or goal is None:
        raise TaskFormatError(None, "missing vars/init/goal section")
    try:
        return SasTask(variables, initial, tuple(operators), goal)
    except TaskError as exc:
        raise TaskFormatError(None, str(exc))


def _parse_graph(lines: list[tuple[int, str]]) -> ExplicitTask:
    num_states: Optional[int] = None
    initial: Optional[int] = None
    goals: Optional[frozenset[int]] = None
    arcs: list[ExplicitArc] = []
    h_entries: dict[int, dict[int, float]] = {}
    for no, ln in lines:
        toks = _tokens(ln)
        kind = toks[0]
        if kind == "states":
            num_states = _int(toks[1], no, "state count")
        elif kind == "init":
            initial = _int(toks[1], no, "initial state")
        elif kind == "goals":
            m = _int(toks[1], no, "goal count")
            if len(toks) != 2 + m:
                raise TaskFormatError(no, f"expected {m} goal state ids")
            goals = frozenset(_int(t, no, "goal state") for t in toks[2:])
        elif kind == "arc":
            if len(toks) != 5:
                raise TaskFormatError(no, "arc line needs: arc SRC LABEL COST DST")
            arcs.append(
                ExplicitArc(
                    src=_int(toks[1], no, "arc source"),
                    label=toks[2],
                    cost=_int(toks[3], no, "arc cost"),
                    dst=_int(toks[4], no, "arc target"),
                )
            )
        elif kind == "h":
            if len(toks) != 4:
                raise TaskFormatError(no, "h line needs: h INDEX STATE VALUE")
            h_idx = _int(toks[1], no, "heuristic index")
            state = _int(toks[2], no, "state id")
            value = INF if toks[3] == "inf" else float(_int(toks[3], no, "heuristic value"))
            if value < 0:
                raise TaskFormatError(no, "heuristic values must be non-negative")
            row = h_entries.setdefault(h_idx, {})
            if state in row:
                raise TaskFormatError(no, f"duplicate table entry h{h_idx}({state})")
            row[state] = value
        else:
            raise TaskFormatError(no, f"unknown directive {kind!r}")
    if num_states is None or initial is None or goals is None:
        raise TaskFormatError(None, "missing states/init/goals section")
    n_heuristics = max(h_entries, default=-1) + 1
    table = tuple(
        tuple(h_entries.get(i, {}).get(s) for s in range(num_states))
        for i in range(n_heuristics)
    )
    try:
        return ExplicitTask(num_states, initial, goals, tuple(arcs), table)
    except TaskError as exc:
        raise TaskFormatError(None, str(exc))


def serialize_task(task: Task) -> str:
    """Serialize a task to the text format (normalized form).

    ``parse_task(serialize_task(t))`` reproduces ``t`` exactly.
    """
    if isinstance(task, SasTask):
        out = ["sas 1"]
        out.append("vars %d %s" % (len(task.variables), " ".join(map(str, task.variables))))
        out.append("init " + " ".join(map(str, task.initial)))
        goal_items = sorted(task.goal.items())
        out.append("goal %d %s" % (len(goal_items), " ".join(f"{v} {d}" for v, d in goal_items)))
        for op in task.operators:
            pre = sorted(op.precondition.items())
            eff = sorted(op.effect.items())
            out.append(
                "op %s %d pre %d %s eff %d %s"
                % (
                    op.name,
                    op.cost,
                    len(pre),
                    " ".join(f"{v} {d}" for v, d in pre),
                    len(eff),
                    " ".join(f"{v} {d}" for v, d in eff),
                )
            )
        return "\n".join(" ".join(line.split()) for line in out) + "\n"
    out = ["graph 1"]
    out.append(f"states {task.num_states}")
    out.append(f"init {task.initial}")
    goals = sorted(task.goal_states)
    out.append("goals %d %s" % (len(goals), " ".join(map(str, goals))))
    for arc in task.arcs:
        out.append(f"arc {arc.src} {arc.label} {arc.cost} {arc.dst}")
    for h_idx, row in enumerate(task.heuristic_table):
        for state, value in enumerate(row):
            if value is None:
                continue
            text = "inf" if value == INF else str(int(value))
            out.append(f"h {h_idx} {state} {text}")
    return "\n".join(" ".join(line.split()) for line in out) + "\n"


def load_task(path) -> Task:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_task(fh.read())


def save_task(task: Task, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_task(task))
