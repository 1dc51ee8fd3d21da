import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, TypeVar

T = TypeVar("T")
R = TypeVar("R")

THREADS_ENV = "CARDYLAB_THREADS"


def resolve_threads(cli_value: int | None, config_value: int | None = None) -> int:
    """--threads beats CARDYLAB_THREADS beats config; never below 1."""
    if cli_value is not None:
        return max(1, int(cli_value))
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ValueError(f"{THREADS_ENV} must be an integer, got '{env}'")
    if config_value is not None:
        return max(1, int(config_value))
    return 1


def map_batches(fn: Callable[[T], R], tasks: Iterable[T], threads: int = 1) -> list[R]:
    """
    Ordered map over independent batches. Results come back in task order,
    so reductions over them are identical for every worker count.
    `fn` must be a module-level function when threads > 1.
    """
    tasks = list(tasks)
    if threads <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=min(threads, len(tasks))) as pool:
        return list(pool.map(fn, tasks))
