"""Ordered task maps over a process pool.

Tasks carry their own index, results come back in index order, and every
random stream is derived from ``(master seed, index)``; the output therefore
does not depend on the number of workers or on scheduling.
"""

from concurrent.futures import ProcessPoolExecutor

from .noise import derive_seed

__all__ = ["task_seeds", "ordered_map"]


def task_seeds(master, n):
    return [derive_seed(master, k) for k in range(n)]


def ordered_map(fn, items, workers=1):
    """``[fn(x) for x in items]``, optionally spread over ``workers`` processes.

    ``fn`` must be picklable (a module-level function) when ``workers > 1``.
    """
    items = list(items)
    if workers is None or workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=int(workers)) as pool:
        return list(pool.map(fn, items))
