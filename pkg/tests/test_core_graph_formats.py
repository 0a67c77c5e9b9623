import importlib
import pathlib
import sys
import tempfile
import unittest

import networkx as nx


ROOT = pathlib.Path(__file__).resolve().parents[1]


def load_core_graph():
    if str(ROOT) not in sys.path:
        sys.path.insert(0, str(ROOT))
    return importlib.import_module("core_graph")


def to_networkx(g):
    out = nx.Graph()
    out.add_nodes_from(g.vertices())
    out.add_edges_from(g.edges())
    return out


class GraphFileTest(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.cg = load_core_graph()
        cls.errors = importlib.import_module("errors")

    def test_case_a_comments_and_blank_lines_are_skipped(self):
        g = self.cg.parse_graph_text("c triangle\n\np 3 3\ne 1 2\ne 2 3\nc mid\ne 1 3\n")

        self.assertEqual(g.vertices(), [0, 1, 2])
        self.assertEqual(g.edges(), [(0, 1), (0, 2), (1, 2)])
        self.assertEqual(self.cg.parse_graph_text(self.cg.format_graph_text(g)), g)

    def test_case_f_written_file_reads_back(self):
        g = self.cg.generate_planar(30, 4)
        with tempfile.TemporaryDirectory() as tmp:
            path = pathlib.Path(tmp) / "g.txt"
            self.cg.write_graph(g, path)

            self.assertEqual(self.cg.read_graph(path), g)
            self.assertTrue(path.read_text(encoding="utf-8").startswith(f"p 30 {g.edge_count()}"))

    def test_case_b_bad_lines_report_their_line_number(self):
        cases = {
            "p 2 1\ne 1 1\n": 2,
            "p 2 1\ne 1 3\n": 2,
            "p 3 2\ne 1 2\ne 2 1\n": 3,
            "e 1 2\n": 1,
            "p 2 1\nx 1 2\n": 2,
        }
        for text, line_no in cases.items():
            with self.subTest(text=text):
                with self.assertRaises(self.errors.ParseError) as ctx:
                    self.cg.parse_graph_text(text)
                self.assertEqual(ctx.exception.line_no, line_no)

    def test_case_c_edge_count_mismatch_is_rejected(self):
        with self.assertRaises(self.errors.ParseError):
            self.cg.parse_graph_text("p 3 3\ne 1 2\n")

    def test_case_d_script_ops_are_zero_based_inside(self):
        ops = self.cg.parse_script_text("# replay\nC 1 2\nN 1\nDE 2 3\nA 1 3\n")

        self.assertEqual([op.kind for op in ops], ["C", "N", "DE", "A"])
        self.assertEqual(ops[0].args, (0, 1))
        self.assertEqual(ops[0].line_no, 2)
        self.assertEqual(self.cg.format_script(ops), "C 1 2\nN 1\nDE 2 3\nA 1 3\n")

    def test_case_e_script_errors(self):
        for text in ("X 1\n", "C 1\n", "N a\n", "N 0\n"):
            with self.subTest(text=text):
                with self.assertRaises(self.errors.ParseError):
                    self.cg.parse_script_text(text)


class GeneratorAndOracleTest(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.cg = load_core_graph()
        cls.errors = importlib.import_module("errors")

    def test_case_a_generated_graphs_are_planar_connected_and_deterministic(self):
        for n, seed in ((1, 0), (3, 1), (50, 2), (400, 3)):
            with self.subTest(n=n, seed=seed):
                g = self.cg.generate_planar(n, seed)
                planar, _ = nx.check_planarity(to_networkx(g))
                self.assertTrue(planar)
                self.assertTrue(self.cg.is_connected(g))
                self.assertTrue(self.cg.planar_edge_bound_ok(len(g), g.edge_count()))
                self.assertTrue(g.is_simple())
                self.assertEqual(self.cg.generate_planar(n, seed), g)

    def test_case_b_oracle_contract_keeps_first_label_and_drops_parallels(self):
        g = self.cg.LabeledGraph(range(4), [(0, 1), (0, 2), (1, 2), (1, 3)])

        self.assertEqual(self.cg.oracle_contract(g, 0, 1), 0)

        self.assertEqual(g.vertices(), [0, 2, 3])
        self.assertEqual(g.edges(), [(0, 2), (0, 3)])
        with self.assertRaises(self.errors.NotAnEdge):
            self.cg.oracle_contract(g, 2, 3)

    def test_case_c_connect_components_adds_one_dummy(self):
        g = self.cg.LabeledGraph(range(5), [(0, 1), (2, 3)])

        dummy = self.cg.connect_components(g)

        self.assertEqual(dummy, 5)
        self.assertEqual(g.neighbors(dummy), [0, 2, 4])
        self.assertTrue(self.cg.is_connected(g))
        self.assertEqual(len(self.cg.connected_components(g)), 1)

    def test_case_d_labeled_graph_rejects_loops_and_parallels(self):
        g = self.cg.LabeledGraph(range(2), [(0, 1)])

        with self.assertRaises(self.errors.SameVertex):
            g.add_edge(0, 0)
        with self.assertRaises(self.errors.EdgeExists):
            g.add_edge(1, 0)
        g.remove_edge(0, 1)
        with self.assertRaises(self.errors.NotAnEdge):
            g.remove_edge(0, 1)
        with self.assertRaises(self.errors.UnknownVertex):
            g.remove_edge(0, 5)


if __name__ == "__main__":
    unittest.main()
