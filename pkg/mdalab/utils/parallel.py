# Licensed under the MIT License.

"""Worker-pool helpers for embarrassingly parallel stages."""

import logging
import os
from multiprocessing import Pool

logger = logging.getLogger(__name__)


def resolve_workers(workers: int | None) -> int:
    if workers is None or workers <= 0:
        return os.cpu_count() or 1
    return workers


def map_tasks(func, items, workers: int | None = 1) -> list:
    """Apply ``func`` to every item, in order, optionally over a process pool.

    Results come back in input order regardless of the worker count; each task owns
    its random stream, so the output does not depend on scheduling.
    """
    items = list(items)
    workers = min(resolve_workers(workers), max(len(items), 1))
    if workers <= 1:
        return [func(item) for item in items]
    logger.info("Dispatching %d tasks to %d workers", len(items), workers)
    with Pool(processes=workers) as pool:
        return pool.map(func, items)
