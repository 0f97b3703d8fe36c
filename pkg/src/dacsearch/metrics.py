"""Rating scales and trace analyses for benchmark runs.

Coverage, guidance, speed, and quality scores all live in [0, 1] per
run; unsolved runs score 0 on every scale.  Guidance and speed
interpolate logarithmically between their one-point and zero-point
anchors (1 expansion / 10^6 expansions, 1 second / 300 seconds); the
exact interpolation formulas are fixed here so numbers are comparable
across implementations.
"""

from __future__ import annotations

import math
from itertools import groupby
from typing import Mapping, Sequence

GUIDANCE_ZERO_EXPANSIONS = 10**6
SPEED_ZERO_SECONDS = 300.0

SWITCH_CLASSES = ("immediate", "high", "medium", "low")


def guidance_score(expansions: int, solved: bool = True) -> float:
    """1 at <= 1 expansion, 0 when unsolved or > 10^6, log10-interpolated between."""
    if not solved or expansions > GUIDANCE_ZERO_EXPANSIONS:
        return 0.0
    if expansions <= 1:
        return 1.0
    return max(0.0, min(1.0, 1.0 - math.log10(expansions) / 6.0))


def speed_score(seconds: float, solved: bool = True) -> float:
    """1 at <= 1 s, 0 when unsolved or >= 300 s, ln-interpolated between."""
    if not solved or seconds >= SPEED_ZERO_SECONDS:
        return 0.0
    if seconds <= 1.0:
        return 1.0
    return max(0.0, min(1.0, 1.0 - math.log(seconds) / math.log(SPEED_ZERO_SECONDS)))


def quality_score(cost, best_cost, solved: bool = True) -> float:
    """best_cost / cost for solved runs; 1 when both costs are zero."""
    if not solved:
        return 0.0
    if best_cost < 0 or cost < best_cost:
        raise ValueError(f"need cost >= best_cost >= 0, got {cost} < {best_cost}")
    if cost == 0:
        return 1.0
    return best_cost / cost


def coverage(solved_runs: Mapping[str, Sequence[bool]]) -> dict[str, float]:
    """Fraction of solved runs per instance."""
    out = {}
    for instance, runs in solved_runs.items():
        if not runs:
            raise ValueError(f"instance {instance!r} has no runs")
        out[instance] = sum(bool(r) for r in runs) / len(runs)
    return out


def domain_score(per_instance: Mapping[str, float]) -> float:
    """Sum of per-instance scores (the per-domain aggregate)."""
    return float(sum(per_instance.values()))


def best_as(member_scores: Mapping[str, Mapping[str, float]]) -> dict[str, float]:
    """Oracle per-instance selection over a family of strategies.

    For each instance, the score of the family's best member; dominates
    every member pointwise by construction.
    """
    if not member_scores:
        raise ValueError("best-as needs at least one member strategy")
    instance_sets = [set(scores) for scores in member_scores.values()]
    instances = instance_sets[0]
    if any(s != instances for s in instance_sets[1:]):
        raise ValueError("member strategies cover different instance sets")
    return {
        inst: max(scores[inst] for scores in member_scores.values()) for inst in instances
    }


def usage_quarters(trace: Sequence[int], n_heuristics: int) -> list[list[float]]:
    """Per-quarter heuristic-selection frequencies of a selection trace.

    The trace is split into four contiguous quarters (integer-division
    remainders go to the earlier quarters); each quarter's frequency
    vector sums to 1.
    """
    length = len(trace)
    if length < 4:
        raise ValueError(f"trace too short to split into quarters (length {length})")
    base, extra = divmod(length, 4)
    out = []
    start = 0
    for q in range(4):
        size = base + (1 if q < extra else 0)
        chunk = trace[start : start + size]
        start += size
        counts = [0] * n_heuristics
        for h in chunk:
            counts[h] += 1
        out.append([c / size for c in counts])
    return out


def switch_frequency(trace: Sequence[int]) -> dict[str, float]:
    """Mass of each switching class, as a fraction of trace steps.

    The trace is split into maximal constant-selection runs; a run of
    length 1 is an immediate switch, 2-100 high, 101-1000 medium, and
    anything longer low frequency.
    """
    masses = dict.fromkeys(SWITCH_CLASSES, 0.0)
    total = len(trace)
    if total == 0:
        return masses
    for _, run in groupby(trace):
        length = sum(1 for _ in run)
        if length == 1:
            cls = "immediate"
        elif length <= 100:
            cls = "high"
        elif length <= 1000:
            cls = "medium"
        else:
            cls = "low"
        masses[cls] += length / total
    return masses
