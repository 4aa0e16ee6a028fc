"""Shared plumbing: thread cap and deterministic parallel map."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

__all__ = ["thread_count", "parallel_map"]


def thread_count() -> int:
    """Worker cap from BESSELMP_THREADS; defaults to 1 (fully sequential)."""
    raw = os.environ.get("BESSELMP_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def parallel_map(fn, items):
    """Order-preserving map over items, threaded only when the cap allows it.

    Work items must not share mutable state; results are identical to the
    sequential map regardless of the cap, so seeded runs stay reproducible.
    """
    items = list(items)
    workers = min(thread_count(), max(1, len(items)))
    if workers == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
