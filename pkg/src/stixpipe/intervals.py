"""Span bookkeeping shared by the extractors."""

from __future__ import annotations

import bisect
from collections.abc import Iterable, Sequence


def select_nonoverlapping(items: Sequence, span_of=lambda item: item) -> list:
    """Greedy selection of non-overlapping spans in the order given.

    ``items`` must already be sorted by the caller's precedence (e.g.
    longest-first, then leftmost); each accepted item blocks any later item
    whose span intersects it. O(n log n).
    """
    starts: list[int] = []
    ends: list[int] = []
    kept = []
    for item in items:
        s, e = span_of(item)
        i = bisect.bisect_right(starts, s)
        if i > 0 and ends[i - 1] > s:
            continue
        if i < len(starts) and starts[i] < e:
            continue
        starts.insert(i, s)
        ends.insert(i, e)
        kept.append(item)
    return kept
