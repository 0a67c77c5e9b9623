import importlib
import pathlib
import sys
import unittest


ROOT = pathlib.Path(__file__).resolve().parents[1]


def load_dynamic_mappings():
    if str(ROOT) not in sys.path:
        sys.path.insert(0, str(ROOT))
    return importlib.import_module("dynamic_mappings")


class LabelMapTest(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.dm = load_dynamic_mappings()
        cls.errors = importlib.import_module("errors")

    def test_case_a_fresh_intext_is_identity(self):
        m = self.dm.IntExtMap(10, [6, 7, 8, 9])

        self.assertEqual([m.internal(x) for x in range(10)], list(range(10)))
        self.assertEqual([m.external(x) for x in range(10)], list(range(10)))
        self.assertFalse(m.managed(3))

    def test_case_b_link_round_trips(self):
        m = self.dm.IntExtMap(10, [6, 7, 8, 9])

        self.dm.intext_set(m, 6, 8)

        self.assertEqual(self.dm.intext_get(m, 6), 8)
        self.assertEqual(self.dm.intext_get(m, 8, "external"), 6)
        self.assertEqual(m.internal(3), 3)

    def test_case_c_dyninv_reads_writes_and_rejects_unmanaged(self):
        d = self.dm.DynInverse(10, [7, 8], [100, 200], max_value=255)

        self.assertEqual(self.dm.dyninv_get(d, 7), 100)
        self.dm.dyninv_set(d, 8, 42)
        self.assertEqual(d.get(8), 42)
        with self.assertRaises(self.errors.NotManaged):
            d.get(3)
        with self.assertRaises(self.errors.NotManaged):
            d.set(9, 1)


class HLevelTest(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.dm = load_dynamic_mappings()
        cls.errors = importlib.import_module("errors")

    def make(self, hashing=False):
        level = self.dm.HLevel([0, 1, 2], piece_count=3, node_offset=3, hashing=hashing)
        level.add_tuple(0, 1, 10, positive=True)
        level.add_tuple(1, 1, 11, positive=True)
        level.add_tuple(1, 2, 12, positive=False)
        level.add_tuple(2, 0, 13, positive=True)
        return level

    def test_case_a_merge_splits_shared_and_dropped_only_pieces(self):
        level = self.make()

        z_cap, z_only = self.dm.phi_merge(level, 0, 1)

        self.assertEqual(z_cap, [(1, 10, 11)])
        self.assertEqual(z_only, [(2, 12)])
        self.assertEqual(sorted(self.dm.phi_iter(level, 0)), [(1, 10), (2, 12)])
        self.assertEqual(self.dm.phi_nonzero_iter(level, 0), [(1, 10)])

    def test_case_b_disjoint_piece_sets_move_everything(self):
        level = self.make()

        z_cap, z_only = level.merge(2, 1, 2)

        self.assertEqual(z_cap, [])
        self.assertEqual(sorted(z_only), [(1, 11), (2, 12)])
        self.assertEqual(level.size(2), 3)
        self.assertEqual(sorted(self.dm.phi_i_iter(level, 2)), [(0, 13), (1, 11), (2, 12)])

    def test_case_c_nonzero_update_is_idempotent(self):
        level = self.make()

        self.assertTrue(level.set_nonzero(1, 2, 12, True))
        self.assertFalse(level.set_nonzero(1, 2, 12, True))
        self.assertIn((2, 12), level.phi_nonzero(1))
        self.dm.nonzero_update(level, 1, 2, 12, False)
        self.dm.nonzero_update(level, 1, 2, 12, False)
        self.assertNotIn((2, 12), level.phi_nonzero(1))

    def test_case_d_hash_follows_merges_and_deletions(self):
        level = self.make(hashing=True)

        level.merge(0, 1, 0)

        self.assertEqual(level.lookup(0, 1), 10)
        self.assertEqual(level.lookup(0, 2), 12)
        self.assertIsNone(level.lookup(1, 2))
        level.delete_vertex(0)
        self.assertIsNone(level.lookup(0, 1))

    def test_case_e_lookup_without_hash_reads_payloads(self):
        level = self.make()

        self.assertEqual(level.lookup(1, 2), 12)
        self.assertIsNone(level.lookup(0, 2))

    def test_case_f_non_boundary_and_deleted_labels(self):
        level = self.make()

        with self.assertRaises(self.errors.NotBoundary):
            level.phi(4)
        with self.assertRaises(self.errors.NotBoundary):
            level.phi(9)
        level.delete_vertex(2)
        with self.assertRaises(self.errors.DeletedVertex):
            level.phi(2)


if __name__ == "__main__":
    unittest.main()
