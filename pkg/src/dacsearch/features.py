"""Planner-state features and the step reward.

The feature vector describes the current search state through the open
lists: for each heuristic, the maximum, minimum, mean, variance, and
count of the live entry values in its list, plus the expansion-step
counter ``t`` as the final component -- 5n+1 numbers for an n-heuristic
portfolio.  Policies consume the elementwise *difference* between
successive feature vectors (progress, not absolute level), with ``t``
passed through raw.
"""

from __future__ import annotations

from typing import Sequence

STATS_PER_LIST = 5  # max, min, mean, variance, count


def compute_features(lists, t: int) -> tuple[float, ...]:
    """Feature vector over the given open lists at step ``t``.

    Empty lists contribute (0, 0, 0, 0, 0); the count component is what
    signals emptiness.
    """
    out: list[float] = []
    for ol in lists:
        out.extend(ol.stats.features())
    out.append(float(t))
    return tuple(out)


def feature_diff(prev: Sequence[float], cur: Sequence[float]) -> tuple[float, ...]:
    """Elementwise difference of the statistics, with ``t`` taken raw.

    The first step of a search has no predecessor; callers realize the
    zero-diff convention there by passing ``prev=cur``.
    """
    if len(prev) != len(cur):
        raise ValueError(f"feature length mismatch: {len(prev)} vs {len(cur)}")
    out = [c - p for p, c in zip(prev[:-1], cur[:-1])]
    out.append(cur[-1])
    return tuple(out)


def num_features(n_heuristics: int) -> int:
    return STATS_PER_LIST * n_heuristics + 1


def step_reward() -> float:
    """Reward per expansion step: -1, terminal step included."""
    return -1.0
