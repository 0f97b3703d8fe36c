import random
from collections import deque

import pytest

from dacsearch.tasks import Operator, SasTask, partial_assignment


def random_sas_task(rng: random.Random, max_vars=4, max_domain=3, max_ops=8, unit_cost=False):
    """Small random finite-domain task; reachable space stays tiny."""
    num_vars = rng.randint(1, max_vars)
    domains = [rng.randint(2, max_domain) for _ in range(num_vars)]
    initial = tuple(rng.randrange(d) for d in domains)
    ops = []
    for i in range(rng.randint(1, max_ops)):
        pre_vars = rng.sample(range(num_vars), rng.randint(0, min(2, num_vars)))
        pre = [(v, rng.randrange(domains[v])) for v in pre_vars]
        eff_vars = rng.sample(range(num_vars), rng.randint(1, min(2, num_vars)))
        eff = [(v, rng.randrange(domains[v])) for v in eff_vars]
        cost = 1 if unit_cost else rng.randint(0, 3)
        ops.append(Operator(f"op{i}", partial_assignment(pre), partial_assignment(eff), cost))
    goal_vars = rng.sample(range(num_vars), rng.randint(1, num_vars))
    goal = partial_assignment((v, rng.randrange(domains[v])) for v in goal_vars)
    return SasTask(tuple(domains), initial, tuple(ops), goal)


def reachable_states(task):
    """All states reachable from the initial state (BFS)."""
    seen = {task.initial_state()}
    queue = deque(seen)
    while queue:
        s = queue.popleft()
        for _, succ in task.successors(s):
            if succ not in seen:
                seen.add(succ)
                queue.append(succ)
    return seen


@pytest.fixture
def rng():
    return random.Random(0xDAC5)
