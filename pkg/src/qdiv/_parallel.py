"""Order-preserving map, optionally threaded (capped by ``QDIV_THREADS``)."""

import os
from concurrent.futures import ThreadPoolExecutor


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get("QDIV_THREADS", "1")))
    except ValueError:
        return 1


def ordered_map(fn, items):
    items = list(items)
    workers = min(thread_count(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
