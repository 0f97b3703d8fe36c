"""Control policies: the per-expansion choice of which open list to pop.

The hierarchy mirrors how much information a policy consumes:

* instance-only (pick one heuristic up front): :class:`SinglePolicy`
* time-only: :class:`AlternationPolicy`, :class:`ScriptedPolicy`
* search-state aware: :class:`ArgminMuPolicy`, :class:`QNetworkPolicy`,
  and remote controllers (see :mod:`dacsearch.bridge`)

Every policy's ``select`` receives the step counter, the current feature
vector, and the feature diff; simpler kinds just ignore what they do not
need.  ``lift_policy`` wraps a single/alternation policy into a
state-aware-shaped policy that reproduces it exactly.
"""

from __future__ import annotations

import random
from typing import Optional, Sequence

from .features import STATS_PER_LIST


class PolicyError(Exception):
    pass


class ControlPolicy:
    """Base class.  ``select`` must return an index < n."""

    def reset(self) -> None:
        """Called once per search episode before the first selection."""

    def select(self, t: int, features: Sequence[float], diff: Sequence[float]) -> int:
        raise NotImplementedError

    def on_episode_end(self, t: int, diff: Sequence[float], outcome: str) -> None:
        """Called once when the search terminates (hook for remote kinds)."""


class SinglePolicy(ControlPolicy):
    """Always the same heuristic."""

    def __init__(self, index: int):
        if index < 0:
            raise PolicyError(f"heuristic index must be >= 0, got {index}")
        self.index = index

    def select(self, t, features, diff):
        return self.index

    def __repr__(self):
        return f"SinglePolicy({self.index})"


class AlternationPolicy(ControlPolicy):
    """Cycle through all heuristics in a fixed permutation, one per step."""

    def __init__(self, permutation: Sequence[int]):
        perm = tuple(permutation)
        if sorted(perm) != list(range(len(perm))):
            raise PolicyError(f"{perm} is not a permutation of 0..{len(perm) - 1}")
        self.permutation = perm

    def select(self, t, features, diff):
        return self.permutation[t % len(self.permutation)]

    def __repr__(self):
        return f"AlternationPolicy({self.permutation})"


class RandomPolicy(ControlPolicy):
    """Uniform random heuristic each step, reproducible per seed."""

    def __init__(self, n: int, seed: int):
        if n < 1:
            raise PolicyError("portfolio size must be >= 1")
        self.n = n
        self.seed = seed
        self._rng = random.Random(seed)

    def reset(self):
        self._rng = random.Random(self.seed)

    def select(self, t, features, diff):
        return self._rng.randrange(self.n)

    def __repr__(self):
        return f"RandomPolicy(n={self.n}, seed={self.seed})"


class ScriptedPolicy(ControlPolicy):
    """Replay a fixed selection sequence; sticks to the last entry after."""

    def __init__(self, sequence: Sequence[int]):
        if not sequence:
            raise PolicyError("scripted policy needs a nonempty sequence")
        self.sequence = tuple(sequence)

    def select(self, t, features, diff):
        return self.sequence[min(t, len(self.sequence) - 1)]

    def __repr__(self):
        return f"ScriptedPolicy(len={len(self.sequence)})"


class ArgminMuPolicy(ControlPolicy):
    """Pick the open list with the minimal mean value of its live entries.

    Empty lists are excluded; ties resolve to the lowest index.
    """

    def select(self, t, features, diff):
        best = None
        best_mu = None
        n = (len(features) - 1) // STATS_PER_LIST
        for i in range(n):
            block = features[STATS_PER_LIST * i : STATS_PER_LIST * (i + 1)]
            count = block[4]
            if count == 0:
                continue
            mu = block[2]
            if best_mu is None or mu < best_mu:
                best = i
                best_mu = mu
        if best is None:
            raise PolicyError("all open lists are empty")
        return best

    def __repr__(self):
        return "ArgminMuPolicy()"


class QNetworkPolicy(ControlPolicy):
    """Greedy action of a trained Q-network over the feature diff."""

    def __init__(self, network):
        self.network = network

    def select(self, t, features, diff):
        q = self.network.forward(diff)
        best = 0
        for i in range(1, len(q)):
            if q[i] > q[best]:
                best = i
        return best

    def __repr__(self):
        return f"QNetworkPolicy({self.network!r})"


class LiftedPolicy(ControlPolicy):
    """State-aware-shaped wrapper around a time/instance-only policy.

    Ignores features and diff entirely, so it reproduces the wrapped
    policy's expansion trace exactly.
    """

    def __init__(self, inner: ControlPolicy):
        if not isinstance(inner, (SinglePolicy, AlternationPolicy)):
            raise PolicyError(f"cannot lift {type(inner).__name__}")
        self.inner = inner

    def reset(self):
        self.inner.reset()

    def select(self, t, features, diff):
        return self.inner.select(t, None, None)

    def __repr__(self):
        return f"LiftedPolicy({self.inner!r})"


def lift_policy(policy: ControlPolicy) -> LiftedPolicy:
    return LiftedPolicy(policy)


def parse_policy_spec(spec: str, n: int, seed_offset: int = 0) -> ControlPolicy:
    """Build a policy from its spec string.

    Formats: ``single:<i>``, ``alt:<perm digits>``, ``rnd:<seed>``,
    ``argmin-mu``, ``scripted:<digits>``, ``q:<model file>``,
    ``remote:<host:port>``.  ``seed_offset`` shifts the seed of
    stochastic kinds (used by the experiment harness to vary runs);
    deterministic kinds ignore it.
    """
    if spec == "argmin-mu":
        return ArgminMuPolicy()
    kind, _, arg = spec.partition(":")
    if kind == "single":
        index = int(arg)
        if index >= n:
            raise PolicyError(f"single:{index} out of range for {n} heuristics")
        return SinglePolicy(index)
    if kind == "alt":
        perm = [int(c) for c in arg]
        if len(perm) != n:
            raise PolicyError(f"alt permutation {arg!r} must have length {n}")
        return AlternationPolicy(perm)
    if kind == "rnd":
        return RandomPolicy(n, int(arg) + seed_offset)
    if kind == "scripted":
        seq = [int(c) for c in arg]
        if any(i >= n for i in seq):
            raise PolicyError(f"scripted sequence {arg!r} has out-of-range indices")
        return ScriptedPolicy(seq)
    if kind == "q":
        from .training import load_policy

        return load_policy(arg, expected_n=n)
    if kind == "remote":
        from .bridge import RemotePolicy

        host, _, port = arg.rpartition(":")
        return RemotePolicy(host, int(port))
    raise PolicyError(f"unknown policy spec {spec!r}")
