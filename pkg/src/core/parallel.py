import logging
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

logger = logging.getLogger(__name__)

THREADS_ENV = 'EXPSKEL_THREADS'

T = TypeVar('T')
R = TypeVar('R')


def worker_count(requested: Optional[int] = None) -> int:
    """
    Number of worker threads for data-parallel tasks.

    Args:
        requested: Explicit count; capped by EXPSKEL_THREADS when that is set

    Returns:
        Positive thread count
    """
    cap = None
    raw = os.environ.get(THREADS_ENV)
    if raw:
        try:
            cap = max(1, int(raw))
        except ValueError:
            logger.warning(f"Ignoring invalid {THREADS_ENV}={raw!r}")
    count = requested if requested is not None else (os.cpu_count() or 1)
    if cap is not None:
        count = min(count, cap)
    return max(1, count)


def parallel_map(func: Callable[[T], R], items: Iterable[T], workers: Optional[int] = None) -> List[R]:
    """Order-preserving map over a thread pool (sequential for one worker)."""
    items = list(items)
    count = min(worker_count(workers), max(1, len(items)))
    if count == 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=count) as pool:
        return list(pool.map(func, items))
