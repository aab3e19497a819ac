"""Thread-count resolution and an order-preserving parallel map."""

import os
from concurrent.futures import ThreadPoolExecutor

THREADS_ENV = "INFBIN_THREADS"


def default_threads() -> int:
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ValueError(f"{THREADS_ENV} must be an integer, got {env!r}") from None
        if n >= 1:
            return n
    return os.cpu_count() or 1


def map_ordered(fn, items, threads=None):
    """``list(map(fn, items))``, spread over threads; output order is input order."""
    items = list(items)
    threads = threads or default_threads()
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=min(threads, len(items))) as pool:
        return list(pool.map(fn, items))
