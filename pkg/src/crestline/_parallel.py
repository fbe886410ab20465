"""Thread-pool fan-out for independent solver runs.

Regime computations and certifications for different Bernoulli constants
share no mutable state, so they can run concurrently. On GIL builds the
pool still overlaps the time scipy spends in compiled code; on free-threaded
builds (3.14t+) it gives true parallelism.

**When to Use:**

- ✅ Sweeps over many r values (`regime_many`, `cusp_table`)
- ✅ Certifying many stored fields (`certify_many`)

- ❌ A single continuation branch: steps depend on each other

**Thread-Safety:**

Callers must pass functions that only read their arguments. Results are
returned in input order regardless of completion order.
"""

from __future__ import annotations

import os
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import TYPE_CHECKING, TypeVar

if TYPE_CHECKING:
    from collections.abc import Callable, Sequence

__all__ = ["is_free_threaded", "map_parallel", "default_workers"]

T = TypeVar("T")
R = TypeVar("R")


def is_free_threaded() -> bool:
    """Check if running on free-threaded Python (3.14t+)."""
    if hasattr(sys, "_is_gil_enabled"):
        return not sys._is_gil_enabled()
    return False


def default_workers() -> int:
    """Worker count used when the caller gives none."""
    return min(4, os.cpu_count() or 1)


def map_parallel(
    fn: Callable[[T], R],
    items: Sequence[T],
    *,
    max_workers: int | None = None,
) -> list[R]:
    """Apply `fn` to every item, in parallel when worthwhile.

    Args:
        fn: Function of one item; must not mutate shared state.
        items: Inputs.
        max_workers: Thread count; None uses `default_workers()`.

    Returns:
        Results in the order of `items`. The first exception raised by any
        call propagates.
    """
    items = list(items)
    workers = default_workers() if max_workers is None else max(1, max_workers)
    if len(items) < 2 or workers == 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=min(workers, len(items))) as executor:
        return list(executor.map(fn, items))
