from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import TYPE_CHECKING, TypeVar

from lumaca.utils.config import Config

if TYPE_CHECKING:
    from collections.abc import Callable

logger = logging.getLogger(__name__)

T = TypeVar("T")

__all__ = ["batch_ranges", "map_batches"]


def batch_ranges(n: int, batch_size: int | None = None) -> list[range]:
    """Split ``range(n)`` into consecutive batches of path indices."""
    size = Config.batch_size() if batch_size is None else int(batch_size)
    return [range(start, min(start + size, n)) for start in range(0, n, size)]


def map_batches(
        fn: Callable[[range], T],
        n: int,
        *,
        batch_size: int | None = None,
        threads: int | None = None,
) -> list[T]:
    """
    Apply ``fn`` to every batch of path indices.

    Results are returned in batch order whatever the number of workers, so
    any reduction over them is independent of thread scheduling.
    """
    batches = batch_ranges(n, batch_size)
    workers = Config.threads() if threads is None else int(threads)
    logger.debug(
        "mapping %d paths in %d batches on %d thread(s)",
        n, len(batches), workers,
    )
    if workers <= 1 or len(batches) <= 1:
        return [fn(b) for b in batches]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, batches))
