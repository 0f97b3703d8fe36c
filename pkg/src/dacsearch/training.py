"""Epsilon-greedy double Q-learning over feature diffs.

The search itself is the environment: one expansion step is one
environment step with reward -1, the feature diff is the observation,
and the list index is the action.  Episodes end when a plan is found or
the space is exhausted (``done``); hitting the expansion cutoff
truncates the episode, and the corresponding transition keeps
``done=False`` so the value bootstrap stays intact.

One gradient update is performed per environment step once the replay
buffer holds ``warmup`` transitions.  A frozen target network is
resynced every ``target_sync_interval`` updates; every
``eval_interval`` updates the current greedy policy is evaluated on the
evaluation set and kept as incumbent if it is the best seen so far
(higher coverage first, fewer total expansions as tie-break).
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from typing import Optional, Sequence

import numpy as np

from .features import num_features
from .heuristics import make_portfolio
from .nn import AdamOptimizer, Mlp
from .policies import QNetworkPolicy
from .search import BUDGET_EXCEEDED, PLAN_FOUND, RUNNING, Budget, GbfsRun, run_gbfs

MODEL_FORMAT = "dacsearch-qpolicy"
MODEL_VERSION = 1


@dataclass(frozen=True)
class Transition:
    s: tuple
    a: int
    r: float
    s2: tuple
    done: bool


class ReplayBuffer:
    """Fixed-capacity ring buffer with uniform sampling."""

    def __init__(self, capacity: int, seed: int = 0):
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        self.capacity = capacity
        self._data: list[Transition] = []
        self._next = 0
        self._rng = np.random.default_rng(seed)

    def __len__(self) -> int:
        return len(self._data)

    def add(self, tr: Transition) -> None:
        if len(self._data) < self.capacity:
            self._data.append(tr)
        else:
            self._data[self._next] = tr
        self._next = (self._next + 1) % self.capacity

    def sample(self, batch_size: int) -> list[Transition]:
        if batch_size > len(self._data):
            raise ValueError("not enough transitions to sample a batch")
        idx = self._rng.integers(0, len(self._data), size=batch_size)
        return [self._data[i] for i in idx]


@dataclass
class TrainConfig:
    total_updates: int
    epsilon_start: float = 1.0
    epsilon_end: float = 0.1
    epsilon_decay_steps: int = 500_000
    gamma: float = 0.99
    learning_rate: float = 1e-3
    batch_size: int = 32
    target_sync_interval: int = 1_000
    episode_cutoff: int = 7_500
    eval_interval: int = 30_000
    replay_capacity: int = 100_000
    warmup: int = 1_000
    hidden_layers: tuple[int, ...] = (75, 75)
    normalize_features: bool = False
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.epsilon_end <= self.epsilon_start <= 1.0:
            raise ValueError("need 0 <= epsilon_end <= epsilon_start <= 1")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError("gamma must be in [0, 1]")
        if self.episode_cutoff <= 0:
            raise ValueError("episode cutoff must be positive")
        if self.total_updates < 0:
            raise ValueError("total_updates must be >= 0")


def epsilon_at(config: TrainConfig, update_step: int) -> float:
    """Linear decay from epsilon_start to epsilon_end, then constant."""
    if update_step < 0:
        raise ValueError("update step must be >= 0")
    if config.epsilon_decay_steps <= 0 or update_step >= config.epsilon_decay_steps:
        return config.epsilon_end
    frac = update_step / config.epsilon_decay_steps
    return config.epsilon_start + frac * (config.epsilon_end - config.epsilon_start)


def double_dqn_target(online: Mlp, target: Mlp, tr: Transition, gamma: float) -> float:
    """r if terminal, else r + gamma * Q_target(s', argmax_a Q_online(s', a))."""
    if tr.done:
        return tr.r
    q_online = online.forward(tr.s2)
    best = int(np.argmax(q_online))
    return tr.r + gamma * float(target.forward(tr.s2)[best])


def _batch_targets(online: Mlp, target: Mlp, X2: np.ndarray, batch: Sequence[Transition], gamma: float) -> np.ndarray:
    best = np.argmax(online.forward_batch(X2), axis=1)
    q_next = target.forward_batch(X2)[np.arange(len(batch)), best]
    rewards = np.array([tr.r for tr in batch])
    live = np.array([0.0 if tr.done else 1.0 for tr in batch])
    return rewards + gamma * live * q_next


class RunningNorm:
    """Elementwise running mean/std (Welford) for optional input scaling."""

    def __init__(self, dim: int):
        self.count = 0
        self.mean = np.zeros(dim)
        self._m2 = np.zeros(dim)

    def update(self, x) -> None:
        x = np.asarray(x, dtype=np.float64)
        self.count += 1
        delta = x - self.mean
        self.mean += delta / self.count
        self._m2 += delta * (x - self.mean)

    def std(self) -> np.ndarray:
        if self.count < 2:
            return np.ones_like(self.mean)
        return np.sqrt(self._m2 / self.count + 1e-8)

    def apply(self, X: np.ndarray) -> np.ndarray:
        return (np.asarray(X, dtype=np.float64) - self.mean) / self.std()


class NormalizedNetwork:
    """Q-network with a frozen input normalization attached."""

    def __init__(self, net: Mlp, mean: np.ndarray, std: np.ndarray):
        self.net = net
        self.mean = np.asarray(mean, dtype=np.float64)
        self.std = np.asarray(std, dtype=np.float64)

    def forward(self, x) -> np.ndarray:
        x = (np.asarray(x, dtype=np.float64) - self.mean) / self.std
        return self.net.forward(x)


@dataclass
class EvalPoint:
    update_step: int
    coverage: float
    total_expansions: int
    mean_expansions: float
    incumbent_updated: bool


@dataclass
class TrainResult:
    network: Mlp
    normalizer: Optional[NormalizedNetwork]
    curve: list[EvalPoint]
    config: TrainConfig
    n_heuristics: int
    feature_len: int

    def policy(self) -> QNetworkPolicy:
        return QNetworkPolicy(self.normalizer if self.normalizer is not None else self.network)


def evaluate_policy(policy, instances, portfolios, cutoff: int):
    """Greedy rollouts; returns (coverage, total expansions, mean expansions)."""
    solved = 0
    total = 0
    for task, portfolio in zip(instances, portfolios):
        result = run_gbfs(task, portfolio, policy, Budget(max_expansions=cutoff))
        total += result.expansions
        if result.outcome == PLAN_FOUND:
            solved += 1
    return solved / len(instances), total, total / len(instances)


def train(
    instances: Sequence,
    config: TrainConfig,
    portfolios: Optional[Sequence[Sequence]] = None,
    eval_instances: Optional[Sequence] = None,
    eval_portfolios: Optional[Sequence[Sequence]] = None,
    on_update=None,
) -> TrainResult:
    """Train a Q-network controller on a round-robin over ``instances``.

    ``portfolios`` defaults to each task's standard portfolio; the
    evaluation set defaults to the training set.  Fully deterministic for
    a fixed config (seed included).  ``on_update(step, online, target)``
    is called after every gradient update (instrumentation hook).
    """
    if not instances:
        raise ValueError("need at least one training instance")
    if portfolios is None:
        portfolios = [make_portfolio(task) for task in instances]
    if eval_instances is None:
        eval_instances, eval_portfolios = instances, portfolios
    elif eval_portfolios is None:
        eval_portfolios = [make_portfolio(task) for task in eval_instances]
    n = len(portfolios[0])
    if any(len(p) != n for p in portfolios) or any(len(p) != n for p in eval_portfolios):
        raise ValueError("all portfolios must have the same size")
    feat_len = num_features(n)

    seeds = np.random.SeedSequence(config.seed).spawn(3)
    online = Mlp((feat_len, *config.hidden_layers, n), seed=seeds[0])
    target = online.copy()
    optimizer = AdamOptimizer(lr=config.learning_rate)
    buffer = ReplayBuffer(config.replay_capacity, seed=seeds[1])
    act_rng = np.random.default_rng(seeds[2])
    norm = RunningNorm(feat_len) if config.normalize_features else None

    def q_input(diff):
        if norm is None:
            return diff
        return norm.apply(np.asarray(diff, dtype=np.float64))

    def greedy_snapshot(net: Mlp):
        net_copy = net.copy()
        if norm is None:
            return net_copy, None
        return net_copy, NormalizedNetwork(net_copy, norm.mean.copy(), norm.std().copy())

    incumbent = online.copy()
    incumbent_norm = None if norm is None else NormalizedNetwork(incumbent, norm.mean.copy(), norm.std().copy())
    incumbent_score = None
    curve: list[EvalPoint] = []
    updates = 0

    def run_eval():
        nonlocal incumbent, incumbent_norm, incumbent_score
        net_copy, net_norm = greedy_snapshot(online)
        policy = QNetworkPolicy(net_norm if net_norm is not None else net_copy)
        coverage, total, mean = evaluate_policy(
            policy, eval_instances, eval_portfolios, config.episode_cutoff
        )
        score = (coverage, -total)
        better = incumbent_score is None or score > incumbent_score
        if better:
            incumbent, incumbent_norm, incumbent_score = net_copy, net_norm, score
        curve.append(EvalPoint(updates, coverage, total, mean, better))

    instance_idx = 0
    while updates < config.total_updates:
        task = instances[instance_idx % len(instances)]
        portfolio = portfolios[instance_idx % len(instances)]
        instance_idx += 1
        run = GbfsRun(task, portfolio, Budget(max_expansions=config.episode_cutoff))
        pending = None  # (diff, action) awaiting its done flag
        while True:
            status = run.status()
            if status != RUNNING:
                if pending is not None:
                    done = status != BUDGET_EXCEEDED  # cutoff truncates, does not terminate
                    buffer.add(Transition(pending[0], pending[1], -1.0, run.diff, done))
                break
            diff = run.diff
            if norm is not None:
                norm.update(diff)
            epsilon = epsilon_at(config, updates)
            if act_rng.random() < epsilon:
                action = int(act_rng.integers(n))
            else:
                action = int(np.argmax(online.forward(q_input(diff))))
            if not run.step(action):
                continue  # terminal pop; loop top commits the pending transition
            if pending is not None:
                buffer.add(Transition(pending[0], pending[1], -1.0, diff, False))
            pending = (diff, action)
            if len(buffer) >= config.warmup and updates < config.total_updates:
                batch = buffer.sample(config.batch_size)
                X = np.array([tr.s for tr in batch], dtype=np.float64)
                X2 = np.array([tr.s2 for tr in batch], dtype=np.float64)
                if norm is not None:
                    X = norm.apply(X)
                    X2 = norm.apply(X2)
                targets = _batch_targets(online, target, X2, batch, config.gamma)
                actions = [tr.a for tr in batch]
                _, grads = online.td_gradients(X, actions, targets)
                optimizer.step(online.params, grads)
                updates += 1
                if updates % config.target_sync_interval == 0:
                    target.load_from(online)
                if on_update is not None:
                    on_update(updates, online, target)
                if config.eval_interval > 0 and updates % config.eval_interval == 0:
                    run_eval()
                if updates >= config.total_updates:
                    break

    if updates > 0 and (config.eval_interval <= 0 or updates % config.eval_interval != 0):
        run_eval()

    return TrainResult(
        network=incumbent,
        normalizer=incumbent_norm,
        curve=curve,
        config=config,
        n_heuristics=n,
        feature_len=feat_len,
    )


def save_policy(path, result_or_net, n_heuristics: Optional[int] = None, config: Optional[TrainConfig] = None) -> None:
    """Write a trained policy to a versioned JSON container."""
    if isinstance(result_or_net, TrainResult):
        net = result_or_net.network
        normalizer = result_or_net.normalizer
        n_heuristics = result_or_net.n_heuristics
        config = result_or_net.config
    else:
        net = result_or_net
        normalizer = None
        if n_heuristics is None:
            n_heuristics = net.sizes[-1]
    payload = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "n_heuristics": n_heuristics,
        "feature_len": net.sizes[0],
        "network": net.to_dict(),
        "normalizer": None
        if normalizer is None
        else {"mean": normalizer.mean.tolist(), "std": normalizer.std.tolist()},
        "config": None if config is None else asdict(config),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh)


def load_policy(path, expected_n: Optional[int] = None) -> QNetworkPolicy:
    """Load a policy container written by :func:`save_policy`."""
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    if payload.get("format") != MODEL_FORMAT:
        raise ValueError(f"{path}: not a policy container")
    if payload.get("version") != MODEL_VERSION:
        raise ValueError(f"{path}: unsupported container version {payload.get('version')}")
    if expected_n is not None and payload["n_heuristics"] != expected_n:
        raise ValueError(
            f"{path}: policy is for {payload['n_heuristics']} heuristics, expected {expected_n}"
        )
    net = Mlp.from_dict(payload["network"])
    norm = payload.get("normalizer")
    if norm is not None:
        network = NormalizedNetwork(net, np.array(norm["mean"]), np.array(norm["std"]))
        return QNetworkPolicy(network)
    return QNetworkPolicy(net)
