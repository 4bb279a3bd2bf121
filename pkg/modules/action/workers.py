"""
Worker Pool
===========
Order-preserving parallel map shared by stencil, sample and quadruple
evaluations. Results come back in input order for any job count.
"""

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar('T')
R = TypeVar('R')


def default_jobs() -> int:
    """Logical core count"""
    return os.cpu_count() or 1


def parallel_map(func: Callable[[T], R], items: Iterable[T], jobs: int = 1) -> List[R]:
    """
    Apply func to every item, possibly on a thread pool.

    Args:
        func: Pure function of one item
        items: Inputs
        jobs: Worker count (<= 1 runs inline)

    Returns:
        Results in input order
    """
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    workers = min(jobs, len(items))
    logger.debug(f"dispatching {len(items)} tasks to {workers} workers")
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))
