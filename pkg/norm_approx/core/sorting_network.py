"""Counted descending sorts for the rank-weighted norm.

Small inputs go through a Batcher odd-even merge sorting network, whose
comparator count depends only on n. Larger inputs use a top-down merge
sort that counts the comparisons it actually performs.
"""
from functools import lru_cache
from typing import Iterator, List, Sequence, Tuple

# Above this size the network's O(n log^2 n) comparators exceed the
# n * ceil(log2 n) budget of a plain merge sort.
NETWORK_MAX_N = 16


def _oddeven_merge(lo: int, hi: int, r: int) -> Iterator[Tuple[int, int]]:
    step = r * 2
    if step < hi - lo:
        yield from _oddeven_merge(lo, hi, step)
        yield from _oddeven_merge(lo + r, hi, step)
        yield from ((i, i + r) for i in range(lo + r, hi - r, step))
    else:
        yield (lo, lo + r)


def _oddeven_merge_sort_range(lo: int, hi: int) -> Iterator[Tuple[int, int]]:
    # hi is inclusive
    if hi - lo >= 1:
        mid = lo + (hi - lo) // 2
        yield from _oddeven_merge_sort_range(lo, mid)
        yield from _oddeven_merge_sort_range(mid + 1, hi)
        yield from _oddeven_merge(lo, hi, 1)


@lru_cache(maxsize=None)
def comparators(n: int) -> Tuple[Tuple[int, int], ...]:
    """Comparator pairs ``(i, j)``, ``i < j``, of a sorting network for
    `n` inputs.

    The network is built for the next power of two; comparators that
    touch a padding position are dropped. Padding positions hold values
    that sort last, so those comparators would never swap.

    Parameters
    ----------
    n: int
        Number of inputs, n >= 1.

    Returns
    -------
    pairs: Tuple[Tuple[int, int], ...]
        The comparators in application order.
    """
    assert n >= 1
    size = 1
    while size < n:
        size *= 2
    return tuple(
        (i, j) for i, j in _oddeven_merge_sort_range(0, size - 1) if j < n
    )


def network_sort_descending(
    values: Sequence[float],
) -> Tuple[List[float], int]:
    """Sorts `values` in descending order with the comparator network.

    Returns
    -------
    result: List[float]
        The sorted values.
    comparisons: int
        The number of comparators applied.
    """
    out = list(values)
    pairs = comparators(len(out))
    for i, j in pairs:
        if out[i] < out[j]:
            out[i], out[j] = out[j], out[i]
    return out, len(pairs)


def merge_sort_descending(values: Sequence[float]) -> Tuple[List[float], int]:
    """Top-down merge sort in descending order, counting comparisons."""
    if len(values) <= 1:
        return list(values), 0
    mid = len(values) // 2
    left, c_left = merge_sort_descending(values[:mid])
    right, c_right = merge_sort_descending(values[mid:])
    merged: List[float] = []
    count = c_left + c_right
    i = j = 0
    while i < len(left) and j < len(right):
        count += 1
        if left[i] >= right[j]:
            merged.append(left[i])
            i += 1
        else:
            merged.append(right[j])
            j += 1
    merged.extend(left[i:])
    merged.extend(right[j:])
    return merged, count


def counted_sort_descending(
    values: Sequence[float],
) -> Tuple[List[float], int]:
    if len(values) <= NETWORK_MAX_N:
        return network_sort_descending(values)
    return merge_sort_descending(values)


def comparison_band(n: int) -> Tuple[int, int]:
    """Inclusive bounds ``(n - 1, n * ceil(log2 n))`` on the comparisons
    `counted_sort_descending` performs on n values."""
    assert n >= 1
    return n - 1, n * max(1, (n - 1).bit_length())
