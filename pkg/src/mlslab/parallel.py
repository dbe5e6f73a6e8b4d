"""Ordered process-pool map; results never depend on the worker count."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor


def resolve_threads(threads: int | None = None) -> int:
    if threads is None:
        env = os.environ.get("MLSLAB_THREADS")
        threads = int(env) if env else (os.cpu_count() or 1)
    return max(1, int(threads))


def ordered_map(func, items, threads: int | None = 1) -> list:
    items = list(items)
    threads = min(resolve_threads(threads), len(items)) if items else 1
    if threads <= 1:
        return [func(x) for x in items]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, items, chunksize=max(1, len(items) // (4 * threads))))
