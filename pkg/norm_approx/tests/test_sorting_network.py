# mypy: ignore-errors

import itertools
import random
from unittest import main, TestCase

from norm_approx.core.sorting_network import (
    NETWORK_MAX_N,
    comparators,
    comparison_band,
    counted_sort_descending,
    merge_sort_descending,
    network_sort_descending,
)


class TestComparators(TestCase):
    def test_batcher_sizes(self):
        self.assertEqual(len(comparators(1)), 0)
        self.assertEqual(len(comparators(2)), 1)
        self.assertEqual(len(comparators(4)), 5)
        self.assertEqual(len(comparators(8)), 19)
        self.assertEqual(len(comparators(16)), 63)

    def test_pruned_network(self):
        self.assertEqual(comparators(3), ((0, 1), (0, 2), (1, 2)))
        for n in range(1, NETWORK_MAX_N + 1):
            for i, j in comparators(n):
                self.assertLess(i, j)
                self.assertLess(j, n)

    def test_zero_one_principle(self):
        # a network sorts every input iff it sorts every 0-1 input
        for n in range(2, 13):
            with self.subTest(n=n):
                for bits in itertools.product((0.0, 1.0), repeat=n):
                    out, count = network_sort_descending(bits)
                    self.assertEqual(out, sorted(bits, reverse=True))
                    self.assertEqual(count, len(comparators(n)))

    def test_comparisons_within_band(self):
        for n in range(2, NETWORK_MAX_N + 1):
            lo, hi = comparison_band(n)
            with self.subTest(n=n):
                self.assertLessEqual(lo, len(comparators(n)))
                self.assertLessEqual(len(comparators(n)), hi)


class TestMergeSort(TestCase):
    def test_sorts_descending(self):
        rng = random.Random(5)
        for n in (0, 1, 2, 3, 17, 33, 100, 257):
            values = [rng.uniform(-1.0, 1.0) for _ in range(n)]
            out, count = merge_sort_descending(values)
            self.assertEqual(out, sorted(values, reverse=True))
            if n >= 1:
                lo, hi = comparison_band(n)
                self.assertGreaterEqual(count, lo)
                self.assertLessEqual(count, hi)

    def test_ties_and_presorted(self):
        out, count = merge_sort_descending([2.0, 2.0, 2.0, 2.0])
        self.assertEqual(out, [2.0] * 4)
        self.assertEqual(count, 4)
        out, _ = merge_sort_descending([1.0, 2.0, 3.0, 4.0, 5.0])
        self.assertEqual(out, [5.0, 4.0, 3.0, 2.0, 1.0])


class TestCountedSort(TestCase):
    def test_dispatch(self):
        rng = random.Random(9)
        small = [rng.random() for _ in range(NETWORK_MAX_N)]
        large = [rng.random() for _ in range(NETWORK_MAX_N + 1)]
        out, count = counted_sort_descending(small)
        self.assertEqual(out, sorted(small, reverse=True))
        self.assertEqual(count, 63)
        out, count = counted_sort_descending(large)
        self.assertEqual(out, sorted(large, reverse=True))
        self.assertEqual(count, merge_sort_descending(large)[1])

    def test_band(self):
        self.assertEqual(comparison_band(1), (0, 1))
        self.assertEqual(comparison_band(8), (7, 24))
        self.assertEqual(comparison_band(9), (8, 36))
        self.assertEqual(comparison_band(17), (16, 85))


if __name__ == "__main__":
    main()
