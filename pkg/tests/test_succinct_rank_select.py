import importlib
import pathlib
import sys
import unittest

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st


ROOT = pathlib.Path(__file__).resolve().parents[1]


def load_succinct():
    if str(ROOT) not in sys.path:
        sys.path.insert(0, str(ROOT))
    return importlib.import_module("succinct")


class RankSelectTest(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.sc = load_succinct()
        cls.errors = importlib.import_module("errors")

    def check_against_scan(self, universe, members):
        d = self.sc.id_build(universe, members)
        member_set = set(members)
        running = 0
        for x in range(universe + 1):
            self.assertEqual(self.sc.id_rank(d, x), running)
            if x < universe:
                self.assertEqual(self.sc.id_member(d, x), x in member_set)
                running += x in member_set
        for i, x in enumerate(members):
            self.assertEqual(self.sc.id_select(d, i), x)

    def test_case_a_thousand_random_instances_match_linear_scan(self):
        rng = np.random.default_rng(1234)
        for _ in range(1000):
            universe = int(rng.integers(0, 700))
            density = rng.random()
            members = [x for x in range(universe) if rng.random() < density]
            self.check_against_scan(universe, members)

    @settings(max_examples=60, deadline=None)
    @given(st.sets(st.integers(min_value=0, max_value=2000), max_size=200))
    def test_case_b_property_rank_of_select_is_identity(self, members):
        universe = 2001
        d = self.sc.IndexableDictionary(universe, sorted(members))
        for i in range(len(d)):
            self.assertEqual(d.rank(d.select(i)), i)
        self.assertEqual(d.members(), sorted(members))

    def test_case_c_out_of_range_queries_raise(self):
        d = self.sc.IndexableDictionary(10, [1, 5])

        with self.assertRaises(self.errors.OutOfUniverse):
            d.rank(11)
        with self.assertRaises(self.errors.OutOfUniverse):
            d.member(10)
        with self.assertRaises(self.errors.IndexOutOfRange):
            d.select(2)
        with self.assertRaises(self.errors.OutOfUniverse):
            self.sc.IndexableDictionary(10, [5, 1])
        self.assertNotIn(10, d)
        self.assertNotIn(-1, d)

    def test_case_d_compact_array_rejects_overflow(self):
        arr = self.sc.CompactArray.from_values([0, 3, 7], max_value=7)

        self.assertEqual(arr.to_list(), [0, 3, 7])
        arr[1] = 5
        self.assertEqual(arr[1], 5)
        with self.assertRaises(self.errors.OutOfUniverse):
            arr[0] = 8
        with self.assertRaises(self.errors.OutOfUniverse):
            arr[0] = -1
        with self.assertRaises(self.errors.IndexOutOfRange):
            arr.get(3)
        self.assertEqual(arr.size_in_bits(), 3 * self.sc.bits_for(7))

    def test_case_e_bit_vector_tracks_ones(self):
        bv = self.sc.BitVector(130, ones=[0, 64, 129])

        bv.set(5)
        bv.set(64, False)

        self.assertEqual(bv.ones(), [0, 5, 129])
        self.assertEqual(bv.popcount(), 3)
        self.assertTrue(bv[129])
        with self.assertRaises(self.errors.IndexOutOfRange):
            bv.get(130)

    def test_case_f_sparse_sets_stay_within_entropy_bound(self):
        rng = np.random.default_rng(77)
        for universe, size in [(100000, 10), (1000, 50), (1 << 20, 300), (5000, 2500), (64, 1)]:
            members = sorted(int(x) for x in rng.choice(universe, size=size, replace=False))
            d = self.sc.IndexableDictionary(universe, members)
            bound = 4 * (size * np.log2(universe / size) + size) + 2 * np.log2(universe) + 64

            self.assertLessEqual(d.size_in_bits(), bound, (universe, size))
            self.assertEqual(d.members(), members)
            points = [0, universe - 1] + members[:5] + [m + 1 for m in members[:5] if m + 1 < universe]
            for x in points:
                self.assertEqual(d.rank(x), sum(1 for m in members if m < x))
                self.assertEqual(x in d, x in set(members))

    def test_case_g_sparse_layout_is_picked_for_small_sets_in_large_universes(self):
        self.assertTrue(self.sc.IndexableDictionary(100000, [3, 99999]).sparse)
        self.assertFalse(self.sc.IndexableDictionary(1000, list(range(0, 1000, 2))).sparse)
        self.assertFalse(self.sc.IndexableDictionary(0, []).sparse)
        self.check_against_scan(3000, [7, 400, 2999])

    def test_case_h_growable_array_widens_on_overflow(self):
        arr = self.sc.CompactArray(5, 1, growable=True)

        arr[0] = 1
        arr[3] = 13
        arr[4] = 2

        self.assertEqual(arr.entry_width, 4)
        self.assertEqual(arr.to_list(), [1, 0, 0, 13, 2])
        with self.assertRaises(self.errors.OutOfUniverse):
            arr[1] = -1
        with self.assertRaises(self.errors.OutOfUniverse):
            self.sc.CompactArray(2, 1)[0] = 2


if __name__ == "__main__":
    unittest.main()
