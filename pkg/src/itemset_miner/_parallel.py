"""Deterministic data-parallel helper.

Work is split into contiguous chunks and every worker writes only to its own
transaction indices, so results are identical for any thread count. Callers
must reduce with order-independent operations (integer count sums).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence

# Below this many work items threading overhead dominates; run inline.
MIN_CHUNK = 2048


def for_each_slice(worker: Callable[[Sequence, int, int], None], items: Sequence, threads: int) -> None:
    """Invoke worker(items, start, stop) over disjoint slices covering items."""
    n = len(items)
    if n == 0:
        return
    if threads <= 1 or n < 2 * MIN_CHUNK:
        worker(items, 0, n)
        return
    chunks = min(threads, max(1, n // MIN_CHUNK))
    step = (n + chunks - 1) // chunks
    bounds = [(k, min(k + step, n)) for k in range(0, n, step)]
    with ThreadPoolExecutor(max_workers=len(bounds)) as pool:
        futures = [pool.submit(worker, items, a, b) for a, b in bounds]
        for fut in futures:
            fut.result()
