import logging
import os
from collections.abc import Callable, Iterable
from concurrent.futures import ThreadPoolExecutor
from typing import TypeVar

from src.app.config import settings

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def resolve_workers(workers: int | None) -> int:
    """Explicit value, else ASRBENCH_WORKERS, else the CPU count."""
    value = workers if workers is not None else settings.workers
    if value is None:
        value = os.cpu_count() or 1
    if value < 1:
        raise ValueError(f"workers must be >= 1, got {value}")
    return value


def ordered_map(fn: Callable[[T], R], items: Iterable[T], workers: int | None = None) -> list[R]:
    """Apply ``fn`` to every item, results in input order whatever the worker count."""
    items = list(items)
    count = min(resolve_workers(workers), max(1, len(items)))
    if count == 1:
        return [fn(item) for item in items]
    logger.debug("Mapping %d item(s) over %d worker(s)", len(items), count)
    with ThreadPoolExecutor(max_workers=count) as pool:
        return list(pool.map(fn, items))
