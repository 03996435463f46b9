"""
A module for the process-wide worker cap and chunked data-parallel loops
"""

import logging
from logging import Logger
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, TypeVar

T = TypeVar("T")

DEFAULT_CHUNK_SIZE: int = 1 << 18

_num_threads: int = os.cpu_count() or 1


def set_num_threads(
    num_threads: int, logger: Logger = logging.getLogger(__name__)
) -> None:
    """
    Caps the number of worker threads used by chunked pixel loops.

    Args:
        num_threads (int): The maximum number of workers, at least 1.
        logger (Logger): The logger to use for logging.

    Raises:
        ValueError: If num_threads is smaller than 1.
    """
    global _num_threads  # pylint: disable=global-statement
    if isinstance(num_threads, bool) or not isinstance(num_threads, int):
        msg = "Thread count must be an integer"
        logger.error(msg)
        raise ValueError(msg)
    if num_threads < 1:
        msg = f"Thread count must be at least 1, got {num_threads}"
        logger.error(msg)
        raise ValueError(msg)
    logger.debug("Worker cap set to %s", num_threads)
    _num_threads = num_threads


def get_num_threads() -> int:
    """Returns the current worker cap."""
    return _num_threads


def map_chunks(
    fn: Callable[[slice], T],
    length: int,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> List[T]:
    """
    Applies fn to consecutive slices covering range(length).

    Results come back in slice order whatever the worker count, so callers can
    concatenate them and get output that does not depend on threading.

    Args:
        fn (Callable[[slice], T]): The per-chunk function.
        length (int): The number of items to cover.
        chunk_size (int): The number of items per chunk.

    Returns:
        List[T]: One result per chunk, in order.
    """
    slices: List[slice] = [
        slice(start, min(start + chunk_size, length))
        for start in range(0, length, chunk_size)
    ]
    if len(slices) <= 1 or _num_threads == 1:
        return [fn(chunk) for chunk in slices]
    with ThreadPoolExecutor(max_workers=min(_num_threads, len(slices))) as pool:
        return list(pool.map(fn, slices))
