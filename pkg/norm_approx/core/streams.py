"""Seeded, splittable Gaussian streams shared by the fit and the samplers.

Worker ``k`` of a run with seed ``s`` always draws from the ``k``-th child
of ``SeedSequence(s)``, so results only depend on (seed, worker count).
Gaussians come from numpy's PCG64 generator and its ziggurat
``standard_normal``.
"""
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterator, List, Sequence, TypeVar

import numpy as np
from numpy.typing import NDArray

T = TypeVar("T")

DEFAULT_BATCH_SIZE = 1 << 16


def worker_generators(seed: int, workers: int) -> List[np.random.Generator]:
    """One independent generator per worker, derived from `seed`."""
    assert workers >= 1
    children = np.random.SeedSequence(seed).spawn(workers)
    return [np.random.default_rng(child) for child in children]


def split_count(count: int, workers: int) -> List[int]:
    """Splits `count` draws over `workers`; the first ``count % workers``
    workers take one extra draw."""
    base, extra = divmod(count, workers)
    return [base + (1 if k < extra else 0) for k in range(workers)]


def gaussian_batches(
    rng: np.random.Generator, n: int, count: int, batch_size: int
) -> Iterator[NDArray[np.float64]]:
    """Yields ``(rows, n)`` blocks of standard Gaussians totalling `count`
    rows, at most `batch_size` rows at a time."""
    remaining = count
    while remaining > 0:
        rows = min(batch_size, remaining)
        yield rng.standard_normal((rows, n))
        remaining -= rows


def run_workers(tasks: Sequence[Callable[[], T]], workers: int) -> List[T]:
    """Runs `tasks` and returns their results in task order.

    With a single worker the tasks run inline; otherwise on a thread pool
    (numpy releases the GIL in the heavy kernels).
    """
    if workers <= 1 or len(tasks) <= 1:
        return [task() for task in tasks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(task) for task in tasks]
        return [f.result() for f in futures]
