import contextlib
import importlib
import io
import pathlib
import sys
import tempfile
import unittest
from unittest import mock


ROOT = pathlib.Path(__file__).resolve().parents[1]


def load_cli():
    if str(ROOT) not in sys.path:
        sys.path.insert(0, str(ROOT))
    return importlib.import_module("planarsucc")


def graph_text(n, edges):
    lines = [f"p {n} {len(edges)}"] + [f"e {a} {b}" for a, b in edges]
    return "\n".join(lines) + "\n"


class CliCommandTest(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.cli = load_cli()
        cls.tmp = tempfile.TemporaryDirectory()
        cls.dir = pathlib.Path(cls.tmp.name)
        cls.path3 = cls.write("path3.txt", graph_text(3, [(1, 2), (2, 3)]))
        cls.k5 = cls.write("k5.txt", graph_text(5, [(a, b) for a in range(1, 6) for b in range(a + 1, 6)]))
        cls.k33 = cls.write("k33.txt", graph_text(6, [(a, b) for a in range(1, 4) for b in range(4, 7)]))
        # r'=4 の表を一度だけ作ってキャッシュ
        cls.cache = str(cls.dir / "table.mtbl")

    @classmethod
    def tearDownClass(cls):
        cls.tmp.cleanup()

    @classmethod
    def write(cls, name, text):
        path = cls.dir / name
        path.write_text(text, encoding="utf-8")
        return str(path)

    def run_main(self, *argv):
        out, err = io.StringIO(), io.StringIO()
        with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
            code = self.cli.main(list(argv) + ["--table-cache", self.cache])
        return code, out.getvalue(), err.getvalue()

    def test_case_a_run_prints_survivor_and_neighbors(self):
        script = self.write("a.ops", "C 1 2\nN 1\nD 1\n")

        code, out, _ = self.run_main("run", self.path3, "--script", script)

        self.assertEqual(code, 0)
        self.assertEqual(out, "1\n3\n1\n")

    def test_case_b_non_edge_contraction_exits_3_with_partial_output(self):
        script = self.write("b.ops", "N 2\nC 1 3\nN 1\n")

        code, out, err = self.run_main("run", self.path3, "--script", script)

        self.assertEqual(code, self.cli.EXIT_ILLEGAL_OP)
        self.assertEqual(out, "1 3\n")
        self.assertIn("line 2", err)

    def test_case_c_edge_deletion_needs_hashing(self):
        script = self.write("c.ops", "DE 1 2\nN 1\n")

        code, _, err = self.run_main("run", self.path3, "--script", script)
        self.assertEqual(code, self.cli.EXIT_ILLEGAL_OP)
        self.assertIn("hashing mode required", err)

        code, out, _ = self.run_main("run", self.path3, "--script", script, "--hashing")
        self.assertEqual(code, 0)
        self.assertEqual(out, "\n")

    def test_case_d_verify_passes_on_random_ops(self):
        code, out, _ = self.run_main("verify", "--n", "300", "--ops", "500", "--seed", "7")

        self.assertEqual(code, 0)
        self.assertTrue(out.startswith("PASS n=300 ops=500 seed=7"))

    def test_case_e_verify_with_hashing_checks_adjacency(self):
        code, out, _ = self.run_main("verify", "--n", "120", "--ops", "300", "--seed", "3",
                                     "--hashing", "--check-every-op")

        self.assertEqual(code, 0, out)

    def test_case_f_injected_fault_is_caught(self):
        code, out, _ = self.run_main("verify", "--n", "100", "--ops", "50", "--inject-fault")

        self.assertEqual(code, self.cli.EXIT_VERIFY_FAILED)
        self.assertTrue(out.startswith("FAIL"))
        self.assertIn("divergence after", out)

    def test_case_g_broken_neighbors_fail_verification(self):
        enc_mod = importlib.import_module("dynamic_encoding")
        with mock.patch.object(enc_mod.DynamicEncoding, "neighbors", autospec=True, return_value=[]):
            code, out, _ = self.run_main("verify", "--n", "80", "--ops", "40", "--seed", "1")

        self.assertEqual(code, self.cli.EXIT_VERIFY_FAILED)
        self.assertIn("FAIL", out)

    def test_case_h_bench_reports_work_per_size(self):
        code, out, _ = self.run_main("bench", "--sizes", "60,120", "--r", "8", "--r-prime", "3")

        self.assertEqual(code, 0)
        header = out.splitlines()[0].split()
        self.assertEqual(header, ["n", "work", "seconds", "side_bits_per_vertex", "ratio"])
        self.assertEqual(len(out.strip().splitlines()), 3)

    def test_case_i_bench_with_no_sizes_is_fine(self):
        df = self.cli.bench_run(self.cli.RunConfig(command="bench", sizes=()))

        self.assertEqual(len(df), 0)
        self.assertIn("ratio", df.columns)

    def test_case_j_nonplanar_inputs_are_input_errors(self):
        for path in (self.k5, self.k33):
            with self.subTest(path=path):
                code, _, err = self.run_main("build", path)
                self.assertEqual(code, self.cli.EXIT_INPUT_ERROR)
                self.assertIn("input error", err)

    def test_case_k_bad_arguments_are_input_errors(self):
        self.assertEqual(self.run_main("build", str(self.dir / "missing.txt"))[0], self.cli.EXIT_INPUT_ERROR)
        self.assertEqual(self.run_main("verify", "--r-prime", "9")[0], self.cli.EXIT_INPUT_ERROR)
        self.assertEqual(self.run_main("bench", "--sizes", "8,4")[0], self.cli.EXIT_INPUT_ERROR)

    def test_case_l_debug_flag_only_touches_stderr(self):
        script = self.write("l.ops", "C 2 3\nN 1\n")

        _, plain, _ = self.run_main("run", self.path3, "--script", script)
        _, debug, err = self.run_main("run", self.path3, "--script", script, "--debug")

        self.assertEqual(plain, debug)
        self.assertIn("【診断】", err)

    def test_case_m_build_reports_metrics(self):
        code, out, _ = self.run_main("build", self.path3, "--dump")

        self.assertEqual(code, 0)
        self.assertIn("total_bits_per_vertex", out)
        self.assertIn("universe 3 pieces 1", out)

    def test_case_n_run_script_keeps_lines_printed_before_a_bad_op(self):
        cg = importlib.import_module("core_graph")
        g = cg.LabeledGraph(range(3), [(0, 1), (1, 2)])
        enc = importlib.import_module("dynamic_encoding").build_encoding(g)
        ops = cg.parse_script_text("N 2\nD 2\nC 1 3\nN 1\n")
        out = []

        with self.assertRaises(self.cli.ScriptError):
            self.cli.run_script(enc, ops, out=out)

        self.assertEqual(out, ["1 3", "2"])

    def test_case_o_scaled_r_grows_with_size(self):
        cfg = self.cli.parse_run_config(["bench", "--sizes", "1000,8000", "--scaled-r"])

        self.assertTrue(cfg.scaled_r)
        self.assertEqual(cfg.partition_config(1000).r, 100)
        self.assertEqual(cfg.partition_config(8000).r, 169)
        self.assertEqual(cfg.partition_config().r, cfg.r)

    def test_case_p_verify_samples_fewer_vertices_at_large_n(self):
        self.assertEqual(self.cli.verify_budget(300), (self.cli.VERIFY_SAMPLE, self.cli.FULL_CHECK_EVERY))
        self.assertEqual(self.cli.verify_budget(80), (self.cli.VERIFY_SAMPLE, self.cli.FULL_CHECK_EVERY))
        sample, every = self.cli.verify_budget(1000)
        self.assertLess(sample, self.cli.VERIFY_SAMPLE)
        self.assertGreater(every, self.cli.FULL_CHECK_EVERY)
        self.assertGreaterEqual(self.cli.verify_budget(10 ** 6)[0], self.cli.VERIFY_MIN_SAMPLE)

        table = importlib.import_module("microtable").build_table(4)
        cfg = self.cli.RunConfig(command="verify", n=1000, ops=300, seed=2)
        ok, diag = self.cli.verify_run(cfg, table)

        self.assertTrue(ok, diag.get("transcript"))
        self.assertEqual(diag["sample_size"], sample)
        self.assertLessEqual(diag["neighbor_calls"], 300 * (sample + 1))
        self.assertEqual(diag["full_checks"], 300 // every)


class BenchScalingTest(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.cli = load_cli()
        cls.table = importlib.import_module("microtable").build_table(4)

    def test_case_a_contraction_work_doubles_with_n(self):
        df = self.cli.bench_run(self.cli.RunConfig(command="bench", sizes=(1000, 2000, 4000)), self.table)

        ratios = df["ratio"].dropna()
        self.assertEqual(len(ratios), 2)
        for ratio in ratios:
            self.assertGreaterEqual(ratio, 1.5)
            self.assertLessEqual(ratio, 2.5)

    def test_case_b_hashing_minors_stay_within_three_contraction_runs(self):
        df = self.cli.bench_run(self.cli.RunConfig(command="bench", sizes=(1000,), hashing=True), self.table)

        row = df.iloc[0]
        self.assertLess(row["minor_seconds"], 3 * row["seconds"])


if __name__ == "__main__":
    unittest.main()
