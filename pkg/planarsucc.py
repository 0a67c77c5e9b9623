"""planarsucc: build, replay, verify and benchmark the dynamic planar encoding."""
import argparse
import logging
import pathlib
import sys
import time
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import networkx as nx
import numpy as np
import pandas as pd

from core_graph import (
    LabeledGraph,
    Op,
    format_script,
    generate_planar,
    oracle_contract,
    oracle_delete_edge,
    oracle_delete_vertex,
    planar_edge_bound_ok,
    read_graph,
    read_script,
)
from dynamic_encoding import PROBE_FACTOR, DynamicEncoding, build_encoding
from errors import (
    CapExceeded,
    ConfigError,
    DeletedVertex,
    HashingModeRequired,
    InvariantViolation,
    NonplanarResult,
    NotAnEdge,
    NotConnected,
    ParseError,
    PlanarSuccError,
    SameVertex,
    UnknownVertex,
)
from microtable import MicroTable, build_table, load_table, save_table
from partition import DEFAULT_R, DEFAULT_R_PRIME, PartitionConfig, format_hierarchy


logger = logging.getLogger("planarsucc.cli")

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_INPUT_ERROR = 2
EXIT_ILLEGAL_OP = 3

# 検証用ランダム操作の重み (Q は N/D/A のいずれか)
RANDOM_OP_WEIGHTS = {"C": 0.5, "DV": 0.2, "DE": 0.2, "Q": 0.1}
VERIFY_SAMPLE = 32
VERIFY_MIN_SAMPLE = 8
VERIFY_BASE_N = 300
FULL_CHECK_EVERY = 50
DEFAULT_BENCH_SIZES = (1000, 2000, 4000, 8000)

_INPUT_ERRORS = (ParseError, ConfigError, NotConnected, NonplanarResult, CapExceeded, OSError)
_ILLEGAL_OPS = (UnknownVertex, DeletedVertex, NotAnEdge, SameVertex, HashingModeRequired)


class ScriptError(PlanarSuccError):
    """An illegal operation at a given script line."""

    def __init__(self, op: Op, cause: Exception):
        super().__init__(f"line {op.line_no}: {op}: {cause}", {"line_no": op.line_no, "op": str(op)})
        self.line_no = op.line_no
        self.cause = cause


# ========= 設定 =========

@dataclass
class RunConfig:
    command: str
    input: Optional[str] = None
    script: Optional[str] = None
    r: int = DEFAULT_R
    r_prime: int = DEFAULT_R_PRIME
    seed: int = 0
    hashing: bool = False
    check_every_op: bool = False
    sizes: Tuple[int, ...] = DEFAULT_BENCH_SIZES
    n: int = 300
    ops: Optional[int] = None
    debug: bool = False
    inject_fault: bool = False
    dump: bool = False
    table_cache: Optional[str] = None
    scaled_r: bool = False

    def partition_config(self, n: Optional[int] = None) -> PartitionConfig:
        if self.scaled_r and n is not None:
            return PartitionConfig.scaled(n, self.r_prime)
        return PartitionConfig(r=self.r, r_prime=self.r_prime)

    @property
    def op_count(self) -> int:
        return self.ops if self.ops is not None else 3 * self.n


def _parse_sizes(text: str) -> Tuple[int, ...]:
    if not text.strip():
        return ()
    try:
        sizes = tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"sizes must be comma-separated integers: {text!r}") from None
    if list(sizes) != sorted(sizes):
        raise argparse.ArgumentTypeError("sizes must be ascending")
    return sizes


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--r", type=int, default=DEFAULT_R)
    common.add_argument("--r-prime", dest="r_prime", type=int, default=DEFAULT_R_PRIME)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--hashing", action="store_true", help="enable adjacency queries and edge deletion")
    common.add_argument("--check-every-op", dest="check_every_op", action="store_true")
    common.add_argument("--debug", action="store_true", help="【診断】 output on stderr")
    common.add_argument("--table-cache", dest="table_cache", default=None, help="MTBL1 cache file")

    parser = argparse.ArgumentParser(prog="planarsucc", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    p_build = sub.add_parser("build", parents=[common], help="encode a graph file and report sizes")
    p_build.add_argument("input")
    p_build.add_argument("--dump", action="store_true", help="print the label hierarchy and PSE1 dump")
    p_run = sub.add_parser("run", parents=[common], help="replay an operation script")
    p_run.add_argument("input")
    p_run.add_argument("--script", required=True)
    p_verify = sub.add_parser("verify", parents=[common], help="random ops against the naive oracle")
    p_verify.add_argument("--n", type=int, default=300)
    p_verify.add_argument("--ops", type=int, default=None)
    p_verify.add_argument("--inject-fault", dest="inject_fault", action="store_true")
    p_bench = sub.add_parser("bench", parents=[common], help="contract generated graphs to one vertex")
    p_bench.add_argument("--sizes", type=_parse_sizes, default=DEFAULT_BENCH_SIZES)
    p_bench.add_argument("--scaled-r", dest="scaled_r", action="store_true", help="r grows with each size")
    return parser


def parse_run_config(argv: Optional[List[str]] = None) -> RunConfig:
    args = _build_parser().parse_args(argv)
    known = {k: v for k, v in vars(args).items() if k in RunConfig.__dataclass_fields__}
    return RunConfig(**known)


def _setup_logging(debug: bool) -> None:
    root = logging.getLogger("planarsucc")
    root.handlers.clear()
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    root.addHandler(handler)
    root.setLevel(logging.DEBUG if debug else logging.WARNING)
    root.propagate = False


def _load_table(cfg: RunConfig) -> MicroTable:
    if cfg.table_cache:
        path = pathlib.Path(cfg.table_cache)
        if path.exists():
            table = load_table(path)
            if table.r_prime >= cfg.r_prime:
                return table
        table = build_table(cfg.r_prime)
        save_table(table, path)
        return table
    return build_table(cfg.r_prime)


def _require_planar(g: LabeledGraph) -> None:
    n, m = len(g), g.edge_count()
    if not planar_edge_bound_ok(n, m):
        raise ConfigError(f"{m} edges on {n} vertices exceeds the planar bound 3n-6", {"n": n, "m": m})
    nxg = nx.Graph()
    nxg.add_nodes_from(g.vertices())
    nxg.add_edges_from(g.edges())
    planar, _ = nx.check_planarity(nxg)
    if not planar:
        raise ConfigError("input graph is not planar", {"n": n, "m": m})


# ========= build =========

def build_report(g: LabeledGraph, enc: DynamicEncoding) -> pd.DataFrame:
    space = enc.space_report()
    rows = [
        ("n", len(g)),
        ("m", g.edge_count()),
        ("pieces", enc.diag["pieces"]),
        ("micro_graphs", enc.diag["micro_graphs"]),
        ("global_boundary", enc.diag["global_boundary"]),
        ("mini_boundary_total", enc.diag["mini_boundary_total"]),
        ("micro_index_bits", space["micro_index_bits"]),
        ("side_bits", space["side_bits"]),
        ("boundary_graph_bits", space["boundary_graph_bits"]),
        ("total_bits_per_vertex", round(space["total_bits_per_vertex"], 3)),
        ("build_seconds", round(enc.diag["build_seconds"], 4)),
    ]
    return pd.DataFrame(rows, columns=["metric", "value"])


def cmd_build(cfg: RunConfig, table: MicroTable) -> int:
    g = read_graph(cfg.input)
    _require_planar(g)
    enc = build_encoding(g, cfg.partition_config(), table=table, hashing=cfg.hashing)
    print(build_report(g, enc).to_string(index=False))
    if cfg.dump:
        print(format_hierarchy(enc.h))
        print(enc.dump(), end="")
    if cfg.check_every_op:
        enc.check_invariants(g).raise_if_failed()
    return EXIT_OK


# ========= run =========

def _fmt(labels) -> str:
    return " ".join(str(x + 1) for x in sorted(labels))


def apply_op(enc: DynamicEncoding, op: Op) -> Optional[str]:
    """Execute one script op; returns the printed line (None when the op prints nothing)."""
    a = op.args
    if op.kind == "C":
        return str(enc.contract(a[0], a[1]) + 1)
    if op.kind == "DV":
        enc.delete_vertex(a[0])
        return None
    if op.kind == "DE":
        enc.delete_edge(a[0], a[1])
        return None
    if op.kind == "N":
        return _fmt(enc.neighbors(a[0]))
    if op.kind == "D":
        return str(enc.degree(a[0]))
    if op.kind == "A":
        return "1" if enc.adjacent(a[0], a[1]) else "0"
    raise ParseError(op.line_no, f"unknown operation {op.kind!r}")


def run_script(enc: DynamicEncoding, ops: List[Op], check_every_op: bool = False,
               out: Optional[List[str]] = None) -> List[str]:
    """Replay ops; printed lines go to `out`, which keeps what was produced before a failure."""
    out = [] if out is None else out
    for op in ops:
        try:
            line = apply_op(enc, op)
        except _ILLEGAL_OPS as exc:
            raise ScriptError(op, exc) from exc
        if line is not None:
            out.append(line)
        if check_every_op:
            report = enc.check_invariants()
            if not report.ok:
                raise InvariantViolation(f"line {op.line_no}: {report.violations[0]}",
                                         {"line_no": op.line_no, "violations": report.violations})
    return out


def cmd_run(cfg: RunConfig, table: MicroTable) -> int:
    g = read_graph(cfg.input)
    _require_planar(g)
    ops = read_script(cfg.script)
    enc = build_encoding(g, cfg.partition_config(), table=table, hashing=cfg.hashing)
    out: List[str] = []
    try:
        run_script(enc, ops, cfg.check_every_op, out)
    finally:
        for line in out:
            print(line)
    return EXIT_OK


# ========= verify =========

def _random_op(rng: np.random.Generator, oracle: LabeledGraph, hashing: bool) -> Optional[Op]:
    live = oracle.vertices()
    if not live:
        return None
    with_edges = [u for u in live if oracle.degree(u) > 0]
    weights = dict(RANDOM_OP_WEIGHTS)
    if not hashing or not with_edges:
        weights.pop("DE")
    if not with_edges:
        weights.pop("C")
    kinds = list(weights)
    p = np.array([weights[k] for k in kinds])
    kind = kinds[int(rng.choice(len(kinds), p=p / p.sum()))]
    if kind in ("C", "DE"):
        u = with_edges[int(rng.integers(len(with_edges)))]
        nbrs = oracle.neighbors(u)
        v = nbrs[int(rng.integers(len(nbrs)))]
        return Op(kind, (u, v))
    if kind == "DV":
        return Op("DV", (live[int(rng.integers(len(live)))],))
    queries = ["N", "D", "A"] if hashing else ["N", "D"]
    q = queries[int(rng.integers(len(queries)))]
    u = live[int(rng.integers(len(live)))]
    if q == "A":
        return Op("A", (u, live[int(rng.integers(len(live)))]))
    return Op(q, (u,))


def _oracle_apply(oracle: LabeledGraph, op: Op, survivor: Optional[int]) -> Optional[str]:
    a = op.args
    if op.kind == "C":
        dropped = a[1] if survivor == a[0] else a[0]
        oracle_contract(oracle, survivor, dropped)
        return None
    if op.kind == "DV":
        oracle_delete_vertex(oracle, a[0])
        return None
    if op.kind == "DE":
        oracle_delete_edge(oracle, a[0], a[1])
        return None
    if op.kind == "N":
        return _fmt(oracle.neighbors(a[0]))
    if op.kind == "D":
        return str(oracle.degree(a[0]))
    return "1" if a[0] != a[1] and oracle.has_edge(a[0], a[1]) else "0"


def verify_budget(n: int) -> Tuple[int, int]:
    """(vertices sampled per op, ops between full checks); both held fixed up to n=300."""
    scale = max(1, n // VERIFY_BASE_N)
    return max(VERIFY_MIN_SAMPLE, VERIFY_SAMPLE // scale), FULL_CHECK_EVERY * scale


def _compare_sample(enc: DynamicEncoding, oracle: LabeledGraph, rng: np.random.Generator,
                    hashing: bool, stats: Dict[str, float],
                    sample_size: int = VERIFY_SAMPLE) -> Optional[str]:
    live = oracle.vertices()
    if not live:
        return None
    picks = rng.choice(len(live), size=min(sample_size, len(live)), replace=False)
    sample = [live[int(k)] for k in picks]
    for u in sample:
        nbrs = enc.neighbors(u)
        stats["neighbor_calls"] += 1
        stats["worst_probe_ratio"] = max(stats["worst_probe_ratio"], enc.last_probe_cost / (len(nbrs) + 1))
        if enc.last_probe_cost > PROBE_FACTOR * (len(nbrs) + 1):
            return f"neighbors({u + 1}) used {enc.last_probe_cost} probes for degree {len(nbrs)}"
        if set(nbrs) != oracle.neighbor_set(u):
            return f"neighbors({u + 1}): encoding {_fmt(nbrs)} oracle {_fmt(oracle.neighbors(u))}"
        if enc.degree(u) != oracle.degree(u):
            return f"degree({u + 1}): encoding {enc.degree(u)} oracle {oracle.degree(u)}"
    if hashing:
        for u, v in zip(sample, sample[1:]):
            expected = oracle.has_edge(u, v)
            if enc.adjacent(u, v) != expected:
                return f"adjacent({u + 1}, {v + 1}): oracle {int(expected)}"
    return None


def verify_run(cfg: RunConfig, table: Optional[MicroTable] = None) -> Tuple[bool, dict]:
    """Random legal ops on encoding and oracle in lockstep; returns (ok, diag)."""
    started = time.perf_counter()
    g = generate_planar(cfg.n, cfg.seed)
    enc = build_encoding(g, cfg.partition_config(), table=table, hashing=cfg.hashing)
    oracle = g.copy()
    rng = np.random.default_rng(cfg.seed)
    history: List[Op] = []
    sample_size, full_every = verify_budget(cfg.n)
    stats: Dict[str, float] = {"neighbor_calls": 0, "worst_probe_ratio": 0.0, "full_checks": 0}
    diag = {"n": cfg.n, "ops": cfg.op_count, "seed": cfg.seed, "transcript": []}
    diag["sample_size"], diag["full_check_every"] = sample_size, full_every
    if cfg.inject_fault:
        diag["fault"] = enc.inject_fault()
        logger.debug("【診断】injected fault: %s", diag["fault"])

    def _fail(reason: str) -> Tuple[bool, dict]:
        diag["transcript"] = format_script(history).splitlines() + [f"divergence after {len(history)} ops: {reason}"]
        diag.update(stats)
        diag["seconds"] = time.perf_counter() - started
        return False, diag

    report = enc.check_invariants(oracle)
    if not report.ok:
        return _fail(report.violations[0])
    for step in range(cfg.op_count):
        op = _random_op(rng, oracle, cfg.hashing)
        if op is None:
            break
        history.append(op)
        if op.kind == "C":
            u, v = op.args
            rule = v if enc.is_boundary(v) and not enc.is_boundary(u) else u
        try:
            got = apply_op(enc, op)
        except PlanarSuccError as exc:
            return _fail(f"{op}: {type(exc).__name__}: {exc}")
        survivor = int(got) - 1 if op.kind == "C" else None
        if op.kind == "C" and survivor != rule:
            return _fail(f"{op}: survivor {got}, expected {rule + 1}")
        expected = _oracle_apply(oracle, op, survivor)
        if op.kind in ("N", "D", "A") and got != expected:
            return _fail(f"{op}: encoding {got!r} oracle {expected!r}")
        reason = _compare_sample(enc, oracle, rng, cfg.hashing, stats, sample_size)
        if reason:
            return _fail(reason)
        if cfg.check_every_op or (step + 1) % full_every == 0:
            stats["full_checks"] += 1
            report = enc.check_invariants(oracle)
            if not report.ok:
                return _fail(report.violations[0])
        logger.debug("【診断】step %d %s", step + 1, op)
    report = enc.check_invariants(oracle)
    if not report.ok:
        return _fail(report.violations[0])
    diag.update(stats)
    diag["counters"] = dict(enc.counters)
    diag["work"] = enc.work_breakdown()
    diag["seconds"] = time.perf_counter() - started
    return True, diag


def cmd_verify(cfg: RunConfig, table: MicroTable) -> int:
    ok, diag = verify_run(cfg, table)
    if ok:
        print(f"PASS n={diag['n']} ops={diag['ops']} seed={diag['seed']} "
              f"worst_probe_ratio={diag['worst_probe_ratio']:.2f}")
        return EXIT_OK
    print("FAIL")
    for line in diag["transcript"]:
        print(line)
    return EXIT_VERIFY_FAILED


# ========= bench =========

def contraction_order(g: LabeledGraph, root: int) -> List[int]:
    """BFS order from root; every vertex follows its BFS parent."""
    order, seen = [root], {root}
    head = 0
    while head < len(order):
        x = order[head]
        head += 1
        for y in g.neighbors(x):
            if y not in seen:
                seen.add(y)
                order.append(y)
    return order


def contract_all(enc: DynamicEncoding, g: LabeledGraph) -> int:
    order = contraction_order(g, g.vertices()[0])
    survivor = order[0]
    for v in order[1:]:
        survivor = enc.contract(survivor, v)
    return survivor


def delete_all(enc: DynamicEncoding, g: LabeledGraph) -> None:
    for u, v in g.edges():
        enc.delete_edge(u, v)
    for u in g.vertices():
        enc.delete_vertex(u)


def bench_run(cfg: RunConfig, table: Optional[MicroTable] = None) -> pd.DataFrame:
    rows = []
    for n in cfg.sizes:
        g = generate_planar(n, cfg.seed)
        enc = build_encoding(g, cfg.partition_config(n), table=table, hashing=cfg.hashing)
        side_bits = enc.space_report()["side_bits_per_vertex"]
        before = enc.total_work()
        started = time.perf_counter()
        contract_all(enc, g)
        seconds = time.perf_counter() - started
        row = {"n": n, "work": enc.total_work() - before, "seconds": round(seconds, 4),
               "side_bits_per_vertex": round(side_bits, 3)}
        if cfg.hashing:
            enc2 = build_encoding(g, cfg.partition_config(n), table=table, hashing=True)
            started = time.perf_counter()
            delete_all(enc2, g)
            row["minor_seconds"] = round(time.perf_counter() - started, 4)
        rows.append(row)
        logger.debug("【診断】bench n=%d work=%d seconds=%.3f", n, row["work"], seconds)
    df = pd.DataFrame(rows, columns=["n", "work", "seconds", "side_bits_per_vertex"]
                      + (["minor_seconds"] if cfg.hashing else []))
    work = df["work"].astype(float)
    df["ratio"] = (work / work.shift(1)).round(3)
    return df


def cmd_bench(cfg: RunConfig, table: MicroTable) -> int:
    df = bench_run(cfg, table)
    print(df.to_string(index=False))
    return EXIT_OK


# ========= main =========

COMMANDS = {"build": cmd_build, "run": cmd_run, "verify": cmd_verify, "bench": cmd_bench}


def main(argv: Optional[List[str]] = None) -> int:
    try:
        cfg = parse_run_config(argv)
    except SystemExit as exc:
        return EXIT_INPUT_ERROR if exc.code else EXIT_OK
    _setup_logging(cfg.debug)
    try:
        cfg.partition_config()
        table = _load_table(cfg)
        return COMMANDS[cfg.command](cfg, table)
    except ScriptError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ILLEGAL_OP
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_VERIFY_FAILED
    except _INPUT_ERRORS as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except _ILLEGAL_OPS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ILLEGAL_OP


if __name__ == "__main__":
    raise SystemExit(main())
