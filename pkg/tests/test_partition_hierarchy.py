import importlib
import pathlib
import sys
import unittest
from collections import Counter


ROOT = pathlib.Path(__file__).resolve().parents[1]


def load_partition():
    if str(ROOT) not in sys.path:
        sys.path.insert(0, str(ROOT))
    return importlib.import_module("partition")


class PartitionConfigTest(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.pt = load_partition()
        cls.errors = importlib.import_module("errors")

    def test_case_a_bad_parameters_are_config_errors(self):
        for kwargs in ({"r_prime": 1}, {"r_prime": 7}, {"r": 3, "r_prime": 4}, {"size_cap_multiplier": 0}):
            with self.subTest(kwargs=kwargs):
                with self.assertRaises(self.errors.ConfigError):
                    self.pt.PartitionConfig(**kwargs)

    def test_case_b_split_rejects_tiny_cap(self):
        with self.assertRaises(self.errors.ConfigError):
            self.pt.split_pieces([0, 1], [(0, 1)], 1)

    def test_case_c_scaled_r_follows_bit_length_of_n(self):
        self.assertEqual(self.pt.PartitionConfig.scaled(1000).r, 100)
        self.assertEqual(self.pt.PartitionConfig.scaled(8000).r, 169)
        self.assertEqual(self.pt.PartitionConfig.scaled(10).r, self.pt.DEFAULT_R)
        self.assertEqual(self.pt.PartitionConfig.scaled(8000, r_prime=3).r_prime, 3)


class HierarchyTest(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.pt = load_partition()
        cls.cg = importlib.import_module("core_graph")
        cls.errors = importlib.import_module("errors")
        cls.g = cls.cg.generate_planar(300, 11)
        cls.cfg = cls.pt.PartitionConfig(r=8, r_prime=3)
        cls.outer, cls.inners, cls.h = cls.pt.build_hierarchy(cls.g, cls.cfg)

    def test_case_a_pieces_respect_cap_and_cover_edges_once(self):
        pieces = self.pt.split_pieces(self.g.vertices(), self.g.edges(), 16)

        seen = Counter()
        for vs, es in pieces:
            self.assertLessEqual(len(vs), 16)
            vset = set(vs)
            for a, b in es:
                self.assertIn(a, vset)
                self.assertIn(b, vset)
                seen[(a, b)] += 1
        self.assertEqual(seen, Counter(self.g.edges()))

    def test_case_b_hierarchy_holds_every_edge_exactly_once(self):
        self.assertEqual(Counter(self.pt.hierarchy_edges(self.h)), Counter(self.g.edges()))

    def test_case_c_boundary_is_shared_vertices(self):
        count = Counter(u for p in self.outer.pieces for u in p.vertices)

        self.assertEqual(set(self.outer.boundary), {u for u, c in count.items() if c >= 2})
        for u in self.g.vertices():
            self.assertEqual(self.h.is_boundary(u), count[u] >= 2)

    def test_case_d_mini_labels_are_ordered_by_color(self):
        for m in self.h.minis:
            glob = [m.phi_inv[x] for x in range(m.size)]
            self.assertEqual(len(set(glob)), m.size)
            self.assertLessEqual(m.boundary_start, m.double_start)
            for x, u in enumerate(glob):
                self.assertEqual(self.h.is_boundary(u), x >= m.double_start, (m.index, x))

    def test_case_e_micro_labels_and_forbidden_edges(self):
        for m in self.h.minis:
            for mi in m.micro:
                self.assertLessEqual(mi.size, self.cfg.r_prime)
                # 大域境界は必ず二重境界なので global 色は空
                self.assertEqual(mi.global_start, mi.mini_start)
                for a, b in mi.edges:
                    self.assertFalse(a >= mi.mini_start and b >= mi.mini_start, (m.index, mi.index, a, b))
                for y in range(mi.size):
                    x = mi.phi_inv[y]
                    self.assertEqual(x >= m.boundary_start, y >= mi.mini_start)
            for a, b in m.f_edges:
                self.assertTrue(m.is_boundary(a) and m.is_boundary(b))

    def test_case_f_phi_and_inverse_agree(self):
        for u in self.g.vertices():
            for i, x in self.h.phi(u):
                self.assertEqual(self.h.phi_inv(i, x), u)
                for j, y in self.h.phi_i(i, x):
                    self.assertEqual(self.h.phi_inv_ij(i, j, y), x)
            if not self.h.is_boundary(u):
                self.assertEqual(len(self.h.phi(u)), 1)
                self.assertEqual(self.h.phi_single(u), self.h.phi(u)[0])
            else:
                with self.assertRaises(self.errors.NotBoundary):
                    self.h.phi_single(u)

    def test_case_g_small_graph_is_one_piece(self):
        k4 = self.cg.LabeledGraph(range(4), [(a, b) for a in range(4) for b in range(a + 1, 4)])

        _, _, h = self.pt.build_hierarchy(k4, self.pt.PartitionConfig())

        self.assertEqual(h.stats["pieces"], 1)
        self.assertEqual(h.stats["global_boundary"], 0)
        self.assertTrue(self.pt.format_hierarchy(h).startswith("universe 4 pieces 1 boundary 0"))

    def test_case_h_disconnected_input_is_rejected(self):
        g = self.cg.LabeledGraph(range(4), [(0, 1), (2, 3)])

        with self.assertRaises(self.errors.NotConnected):
            self.pt.build_rpartition(g, 8)

    def test_case_i_grid_pieces_stay_under_cap_and_partition_edges(self):
        side = 16
        grid = self.cg.LabeledGraph(
            range(side * side),
            [(r * side + c, r * side + c + 1) for r in range(side) for c in range(side - 1)]
            + [(r * side + c, (r + 1) * side + c) for r in range(side - 1) for c in range(side)],
        )

        part = self.pt.build_rpartition(grid, 32)

        self.assertGreater(part.piece_count(), 1)
        seen = Counter()
        for p in part.pieces:
            self.assertLessEqual(len(p.vertices), 2 * 32)
            for e in p.edges:
                seen[e] += 1
        self.assertEqual(seen, Counter(grid.edges()))

    def test_case_j_path_boundary_is_the_shared_endpoints(self):
        path = self.cg.LabeledGraph(range(100), [(x, x + 1) for x in range(99)])

        part = self.pt.build_rpartition(path, 10)

        count = Counter(u for p in part.pieces for u in p.vertices)
        self.assertTrue(part.boundary)
        self.assertEqual(set(part.boundary), {u for u, c in count.items() if c == 2})
        self.assertLessEqual(max(count.values()), 2)
        for p in part.pieces:
            self.assertLessEqual(len(p.vertices), 20)
            ends = Counter(x for e in p.edges for x in e)
            for u in set(p.vertices) & part.boundary:
                self.assertEqual(ends[u], 1, (u, p.vertices))

    def test_case_k_label_order_gives_phi_without_per_vertex_arrays(self):
        _, _, h = self.pt.build_hierarchy(self.g, self.cfg)
        inner = [u for u in self.g.vertices() if not h.is_boundary(u)]

        for u in inner:
            i, x = h.labels.locate(u)
            self.assertEqual(h.labels.label(i, x), u)
            self.assertEqual(h.minis[i].phi_inv[x], u)
        self.assertLess(h.labels.size_in_bits(), h.labels.naming_bits())
        self.assertGreaterEqual(h.labels.naming_bits(), 2 * len(inner))

        by_piece = {}
        for v in inner:
            by_piece.setdefault(h.phi_single(v)[0], []).append(v)
        u, other = next(vs for vs in by_piece.values() if len(vs) >= 2)[:2]
        i, y = h.phi_single(other)
        h.repoint(u, i, y)
        self.assertEqual(h.phi_single(u), (i, y))
        self.assertEqual(h.phi_inv(i, y), u)


if __name__ == "__main__":
    unittest.main()
