import importlib
import pathlib
import sys
import tempfile
import unittest

import networkx as nx
import numpy as np


ROOT = pathlib.Path(__file__).resolve().parents[1]


def load_microtable():
    if str(ROOT) not in sys.path:
        sys.path.insert(0, str(ROOT))
    return importlib.import_module("microtable")


def oracle_merge(edges, k, u, v):
    """Merge v into u on an edge list and mark v deleted (edge to the dummy)."""
    dummy = k - 1
    keep = {(a, b) for a, b in edges if v not in (a, b)}
    for a, b in edges:
        if v in (a, b):
            w = b if a == v else a
            if w not in (u, dummy):
                keep.add((min(u, w), max(u, w)))
    keep.add((v, dummy))
    return keep


class MicroTableExhaustiveTest(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.mt = load_microtable()
        cls.errors = importlib.import_module("errors")
        cls.table = cls.mt.build_table(4)

    def live_labels(self, code):
        k = code[0]
        return [x for x in range(k - 1) if not self.table.is_deleted(code, x)]

    def test_case_a_every_merge_transition_matches_oracle(self):
        for k in range(1, 6):
            st = self.table.stratum(k)
            for idx in range(st.count):
                code = (k, idx)
                edges = self.table.decode(code)
                live = self.live_labels(code)
                for u in live:
                    for v in live:
                        if u == v:
                            continue
                        want = st.index_of(self.mt.edges_to_mask(oracle_merge(edges, k, u, v)))
                        if want < 0:
                            with self.assertRaises(self.errors.NonplanarResult):
                                self.table.merge(code, u, v)
                        else:
                            self.assertEqual(self.table.merge(code, u, v), (k, want), (k, idx, u, v))

    def test_case_b_range_neighbors_and_batch_delete_match_brute_force(self):
        for k in range(2, 6):
            st = self.table.stratum(k)
            for idx in range(st.count):
                code = (k, idx)
                edges = set(self.table.decode(code))
                for u in self.live_labels(code):
                    nbrs = {b if a == u else a for a, b in edges if u in (a, b)} - {k - 1}
                    for a in range(k - 1):
                        for b in range(a, k - 1):
                            got = self.table.range_neighbors(code, u, a, b)
                            self.assertEqual(sorted(got), sorted(w for w in nbrs if a <= w <= b))
                            after = self.table.batch_delete(code, u, a, b)
                            left = {e for e in edges if not (u in e and a <= (e[1] if e[0] == u else e[0]) <= b)}
                            self.assertEqual(set(self.table.decode(after)), left)

    def test_case_c_tiny_planarity_agrees_with_networkx(self):
        rng = np.random.default_rng(0)
        for _ in range(300):
            n = int(rng.integers(5, 9))
            pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
            edges = [p for p in pairs if rng.random() < 0.55]
            g = nx.Graph()
            g.add_nodes_from(range(n))
            g.add_edges_from(edges)
            expected, _ = nx.check_planarity(g)
            self.assertEqual(self.mt.tiny_planarity(edges) if edges else True, expected, edges)

    def test_case_d_k5_and_k33_are_not_in_the_table(self):
        k5 = [(a, b) for a in range(5) for b in range(a + 1, 5)]
        k33 = [(a, b) for a in range(3) for b in range(3, 6)]

        self.assertFalse(self.mt.tiny_planarity(k5))
        self.assertFalse(self.mt.tiny_planarity(k33))
        self.assertLess(self.table.stratum(5).index_of(self.mt.edges_to_mask(k5)), 0)
        with self.assertRaises(self.errors.NonplanarResult):
            self.table.code_of(5, self.mt.edges_to_mask(k5))

    def test_case_e_stratum_sizes_count_all_graphs_up_to_k4(self):
        # k<=4 の辺集合はすべて平面的
        for k in range(1, 5):
            self.assertEqual(self.table.count(k), 1 << self.mt.pair_count(k))
        self.assertEqual(self.table.count(5), (1 << 10) - 1)

    def test_case_f_delete_vertex_marks_dummy_edge(self):
        code = self.table.encode(3, [(0, 1), (1, 2)])

        code = self.table.delete_vertex(code, 1)

        self.assertTrue(self.table.is_deleted(code, 1))
        self.assertEqual(self.table.degree(code, 0), 0)
        with self.assertRaises(self.errors.DeletedVertex):
            self.table.neighbors(code, 1)

    def test_case_g_cap_is_enforced(self):
        with self.assertRaises(self.errors.CapExceeded):
            self.mt.build_table(7)
        with self.assertRaises(self.errors.TooLarge):
            self.mt.kuratowski_masks(9)

    def test_case_i_triangle_queries_through_entry_points(self):
        k3 = self.table.encode(3, [(0, 1), (0, 2), (1, 2)])

        self.assertEqual(self.mt.tbl_degree(self.table, k3, 0), 2)
        self.assertTrue(self.mt.tbl_adjacent(self.table, k3, 1, 2))
        merged = self.mt.tbl_merge(self.table, k3, 0, 1)
        self.assertEqual(self.mt.tbl_neighbors(self.table, merged, 0), [2])
        with self.assertRaises(self.errors.DeletedVertex):
            self.mt.tbl_neighbors(self.table, merged, 1)
        gone = self.mt.tbl_delete_vertex(self.table, merged, 2)
        self.assertEqual(self.mt.tbl_neighbors(self.table, gone, 0), [])

    def test_case_j_full_range_and_empty_batch_are_neutral(self):
        for k in range(2, 6):
            st = self.table.stratum(k)
            for idx in range(st.count):
                code = (k, idx)
                for u in self.live_labels(code):
                    self.assertEqual(self.mt.tbl_range_neighbors(self.table, code, u, 0, k - 2),
                                     self.table.neighbors(code, u))
                    self.assertEqual(self.mt.tbl_batch_delete(self.table, code, u, 1, 0), code)

    def test_case_h_cache_file_restores_the_same_table(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = pathlib.Path(tmp) / "table.mtbl"
            self.mt.save_table(self.table, path)
            loaded = self.mt.load_table(path)

            self.assertTrue(path.read_bytes().startswith(self.mt.CACHE_MAGIC.encode("ascii")))
        self.assertEqual(loaded.r_prime, 4)
        for k in range(1, 6):
            np.testing.assert_array_equal(loaded.stratum(k).masks, self.table.stratum(k).masks)
        code = self.table.encode(4, [(0, 1), (1, 2), (2, 3)])
        self.assertEqual(loaded.merge(code, 1, 2), self.table.merge(code, 1, 2))


if __name__ == "__main__":
    unittest.main()
