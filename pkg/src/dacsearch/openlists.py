"""Per-heuristic open lists with lazy deletion and running statistics.

Entries are ordered by (heuristic value, insertion sequence number), so
equal values resolve first-in-first-out.  Expanded states are not removed
from the heaps eagerly; they are skipped when they surface (lazy
deletion).  Statistics, in contrast, are corrected exactly at expansion
time, so max/min/mean/variance/count always describe the live entries
only.
"""

from __future__ import annotations

import heapq


class ValueMultiset:
    """Multiset of numbers with O(log n) min/max under arbitrary removal.

    Keeps live multiplicities in a dict plus two lazy heaps; stale heap
    copies are discarded when they reach the top.
    """

    def __init__(self):
        self._counts: dict[float, int] = {}
        self._min_heap: list[float] = []
        self._max_heap: list[float] = []
        self.size = 0

    def add(self, value):
        self._counts[value] = self._counts.get(value, 0) + 1
        heapq.heappush(self._min_heap, value)
        heapq.heappush(self._max_heap, -value)
        self.size += 1

    def remove(self, value):
        live = self._counts.get(value, 0)
        if live <= 0:
            raise KeyError(f"value {value} not in multiset")
        if live == 1:
            del self._counts[value]
        else:
            self._counts[value] = live - 1
        self.size -= 1

    def minimum(self):
        heap = self._min_heap
        while heap and self._counts.get(heap[0], 0) == 0:
            heapq.heappop(heap)
        return heap[0] if heap else None

    def maximum(self):
        heap = self._max_heap
        while heap and self._counts.get(-heap[0], 0) == 0:
            heapq.heappop(heap)
        return -heap[0] if heap else None


class OpenListStats:
    """Exact running statistics over the live entries of one open list."""

    def __init__(self):
        self._values = ValueMultiset()
        self.total = 0.0
        self.total_sq = 0.0

    @property
    def count(self) -> int:
        return self._values.size

    def add(self, value):
        self._values.add(value)
        self.total += value
        self.total_sq += value * value

    def remove(self, value):
        self._values.remove(value)
        self.total -= value
        self.total_sq -= value * value

    def features(self) -> tuple[float, float, float, float, float]:
        """(max, min, mean, variance, count); all zero when empty.

        Variance is the population variance, clamped at zero against
        floating-point rounding.
        """
        n = self._values.size
        if n == 0:
            return (0.0, 0.0, 0.0, 0.0, 0.0)
        mean = self.total / n
        var = self.total_sq / n - mean * mean
        if var < 0.0:
            var = 0.0
        return (
            float(self._values.maximum()),
            float(self._values.minimum()),
            mean,
            var,
            float(n),
        )


class OpenList:
    """One heuristic's priority queue of (value, seq, state) entries."""

    def __init__(self):
        self._heap: list[tuple[float, int, object]] = []
        self.stats = OpenListStats()

    def __len__(self) -> int:
        return len(self._heap)

    def push(self, value, seq: int, state) -> None:
        heapq.heappush(self._heap, (value, seq, state))
        self.stats.add(value)

    def pop(self, is_stale) -> tuple[float, object] | None:
        """Pop the minimum non-stale entry, or None if none remains.

        ``is_stale(state)`` marks entries whose state was already expanded
        through another list; those are dropped silently (their statistics
        were corrected at expansion time).
        """
        heap = self._heap
        while heap:
            value, _, state = heapq.heappop(heap)
            if is_stale(state):
                continue
            return value, state
        return None

    def has_live(self, is_stale) -> bool:
        """True iff a non-stale entry remains (discards stale top entries)."""
        heap = self._heap
        while heap:
            if is_stale(heap[0][2]):
                heapq.heappop(heap)
            else:
                return True
        return False
