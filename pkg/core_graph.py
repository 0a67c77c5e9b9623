"""Labeled simple graphs: the oracle, the generator and the text formats."""
import logging
import pathlib
from collections import deque
from dataclasses import dataclass
from typing import Dict, Iterable, List, Tuple

import numpy as np
from scipy.spatial import Delaunay

from errors import EdgeExists, NotAnEdge, ParseError, SameVertex, UnknownVertex


logger = logging.getLogger("planarsucc.core_graph")

SCRIPT_OPS = {"C": 2, "DV": 1, "DE": 2, "N": 1, "D": 1, "A": 2}
GENERATOR_KEEP_PROBABILITY = 0.7


def _pair(u: int, v: int) -> Tuple[int, int]:
    return (u, v) if u < v else (v, u)


# ========= LabeledGraph =========

class LabeledGraph:
    """Mutable simple undirected graph over integer labels.

    Edge payloads are optional and stored per unordered pair; vertex payloads likewise.
    """

    def __init__(self, vertices: Iterable[int] = (), edges: Iterable[Tuple[int, int]] = ()):
        self._adj: Dict[int, set] = {}
        self.vertex_aux: Dict[int, object] = {}
        self.edge_aux: Dict[Tuple[int, int], object] = {}
        for x in vertices:
            self.add_vertex(x)
        for u, v in edges:
            self.add_vertex(u)
            self.add_vertex(v)
            self.add_edge(u, v)

    # --- 参照 ---

    def __contains__(self, u: int) -> bool:
        return u in self._adj

    def __len__(self) -> int:
        return len(self._adj)

    @property
    def vertex_set(self) -> set:
        return set(self._adj)

    def vertices(self) -> List[int]:
        return sorted(self._adj)

    def edge_count(self) -> int:
        return sum(len(nb) for nb in self._adj.values()) // 2

    def edges(self) -> List[Tuple[int, int]]:
        out = []
        for u, nb in self._adj.items():
            for v in nb:
                if u < v:
                    out.append((u, v))
        out.sort()
        return out

    def _require(self, u: int) -> set:
        try:
            return self._adj[u]
        except KeyError:
            raise UnknownVertex(u) from None

    def neighbors(self, u: int) -> List[int]:
        return sorted(self._require(u))

    def neighbor_set(self, u: int) -> set:
        return self._require(u)

    def degree(self, u: int) -> int:
        return len(self._require(u))

    def has_edge(self, u: int, v: int) -> bool:
        nb = self._adj.get(u)
        return nb is not None and v in nb

    def max_label(self) -> int:
        return max(self._adj) if self._adj else -1

    # --- 変更 ---

    def add_vertex(self, u: int, payload=None) -> None:
        if u not in self._adj:
            self._adj[u] = set()
        if payload is not None:
            self.vertex_aux[u] = payload

    def add_edge(self, u: int, v: int, payload=None) -> None:
        if u == v:
            raise SameVertex(u)
        nu, nv = self._require(u), self._require(v)
        if v in nu:
            raise EdgeExists(u, v)
        nu.add(v)
        nv.add(u)
        if payload is not None:
            self.edge_aux[_pair(u, v)] = payload

    def remove_edge(self, u: int, v: int):
        nu, nv = self._require(u), self._require(v)
        if v not in nu:
            raise NotAnEdge(u, v)
        nu.discard(v)
        nv.discard(u)
        return self.edge_aux.pop(_pair(u, v), None)

    def remove_vertex(self, u: int) -> None:
        for w in list(self._require(u)):
            self.remove_edge(u, w)
        del self._adj[u]
        self.vertex_aux.pop(u, None)

    def copy(self) -> "LabeledGraph":
        g = LabeledGraph()
        g._adj = {u: set(nb) for u, nb in self._adj.items()}
        g.vertex_aux = dict(self.vertex_aux)
        g.edge_aux = dict(self.edge_aux)
        return g

    def is_simple(self) -> bool:
        for u, nb in self._adj.items():
            if u in nb:
                return False
            for v in nb:
                if u not in self._adj.get(v, ()):
                    return False
        return set(self.edge_aux) <= {_pair(u, v) for u, nb in self._adj.items() for v in nb}

    def __eq__(self, other) -> bool:
        if not isinstance(other, LabeledGraph):
            return NotImplemented
        return self._adj == other._adj

    def __repr__(self) -> str:
        return f"LabeledGraph(n={len(self)}, m={self.edge_count()})"


# ========= oracle operations =========

def oracle_contract(g: LabeledGraph, u: int, v: int) -> int:
    """Merge v into u; the surviving label is u."""
    if u not in g:
        raise UnknownVertex(u)
    if v not in g:
        raise UnknownVertex(v)
    if u == v or not g.has_edge(u, v):
        raise NotAnEdge(u, v)
    for w in list(g.neighbor_set(v)):
        if w == u:
            continue
        if not g.has_edge(u, w):
            g.add_edge(u, w)
    g.remove_vertex(v)
    return u


def oracle_delete_vertex(g: LabeledGraph, u: int) -> None:
    g.remove_vertex(u)


def oracle_delete_edge(g: LabeledGraph, u: int, v: int) -> None:
    if u not in g:
        raise UnknownVertex(u)
    if v not in g:
        raise UnknownVertex(v)
    g.remove_edge(u, v)


def connected_components(g: LabeledGraph) -> List[List[int]]:
    """Components as sorted label lists, ordered by smallest label."""
    seen = set()
    comps = []
    for s in g.vertices():
        if s in seen:
            continue
        seen.add(s)
        comp = [s]
        queue = deque([s])
        while queue:
            x = queue.popleft()
            for y in g.neighbor_set(x):
                if y not in seen:
                    seen.add(y)
                    comp.append(y)
                    queue.append(y)
        comps.append(sorted(comp))
    return comps


def is_connected(g: LabeledGraph) -> bool:
    return len(g) <= 1 or len(connected_components(g)) == 1


def connect_components(g: LabeledGraph) -> int:
    """Add a dummy vertex adjacent to the smallest label of every component."""
    comps = connected_components(g)
    dummy = g.max_label() + 1
    g.add_vertex(dummy)
    for comp in comps:
        g.add_edge(dummy, comp[0])
    return dummy


def planar_edge_bound_ok(n: int, m: int) -> bool:
    if n <= 2:
        return m <= max(0, n - 1)
    return m <= 3 * n - 6


# ========= generator =========

def _spanning_forest(n: int, edges: List[Tuple[int, int]], order: np.ndarray) -> set:
    # union-find (rank + path halving) over a shuffled edge order
    parent = list(range(n))
    rank = [0] * n

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    tree = set()
    for k in order:
        a, b = edges[int(k)]
        ra, rb = find(a), find(b)
        if ra == rb:
            continue
        if rank[ra] < rank[rb]:
            ra, rb = rb, ra
        parent[rb] = ra
        if rank[ra] == rank[rb]:
            rank[ra] += 1
        tree.add(edges[int(k)])
    return tree


def _triangulation_edges(points: np.ndarray) -> List[Tuple[int, int]]:
    n = points.shape[0]
    if n <= 3:
        return [(a, b) for a in range(n) for b in range(a + 1, n)]
    tri = Delaunay(points)
    edges = set()
    for simplex in tri.simplices:
        a, b, c = (int(x) for x in simplex)
        edges.add(_pair(a, b))
        edges.add(_pair(b, c))
        edges.add(_pair(a, c))
    return sorted(edges)


def generate_planar(n: int, seed: int, keep_probability: float = GENERATOR_KEEP_PROBABILITY) -> LabeledGraph:
    """Connected simple planar graph on labels 0..n-1.

    Random points in the unit square, Delaunay triangulation, then every non-tree edge
    of a random spanning tree is kept with probability keep_probability.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = np.random.default_rng(seed)
    points = rng.random((n, 2))
    edges = _triangulation_edges(points)
    order = rng.permutation(len(edges)) if edges else np.zeros(0, dtype=np.int64)
    tree = _spanning_forest(n, edges, order)
    coins = rng.random(len(edges))
    kept = [e for e, coin in zip(edges, coins) if e in tree or coin < keep_probability]
    g = LabeledGraph(range(n), kept)
    logger.debug("【診断】generate_planar n=%d seed=%d m=%d (triangulation m=%d)", n, seed, len(kept), len(edges))
    return g


# ========= file formats =========

def _split_fields(line: str) -> List[str]:
    return line.strip().split()


def parse_graph_text(text: str, path: str = "") -> LabeledGraph:
    """Parse `p n m` + `e u v` (1-based) into a graph over labels 0..n-1."""
    n = m = None
    g = None
    seen_edges = 0
    for line_no, raw in enumerate(text.splitlines(), start=1):
        fields = _split_fields(raw)
        if not fields or fields[0] == "c":
            continue
        tag = fields[0]
        if tag == "p":
            if g is not None:
                raise ParseError(line_no, "duplicate header", path)
            if len(fields) != 3:
                raise ParseError(line_no, "header must be `p <n> <m>`", path)
            try:
                n, m = int(fields[1]), int(fields[2])
            except ValueError:
                raise ParseError(line_no, "header counts must be integers", path) from None
            if n < 0 or m < 0:
                raise ParseError(line_no, "header counts must be non-negative", path)
            g = LabeledGraph(range(n))
            continue
        if tag != "e":
            raise ParseError(line_no, f"unknown line tag {tag!r}", path)
        if g is None:
            raise ParseError(line_no, "edge before header", path)
        if len(fields) != 3:
            raise ParseError(line_no, "edge must be `e <u> <v>`", path)
        try:
            u, v = int(fields[1]), int(fields[2])
        except ValueError:
            raise ParseError(line_no, "edge endpoints must be integers", path) from None
        if u == v:
            raise ParseError(line_no, f"self-loop on {u}", path)
        if not (1 <= u <= n and 1 <= v <= n):
            raise ParseError(line_no, f"endpoint outside 1..{n}", path)
        if g.has_edge(u - 1, v - 1):
            raise ParseError(line_no, f"parallel edge {{{u}, {v}}}", path)
        g.add_edge(u - 1, v - 1)
        seen_edges += 1
    if g is None:
        raise ParseError(0, "missing `p <n> <m>` header", path)
    if seen_edges != m:
        raise ParseError(0, f"header announces {m} edges, found {seen_edges}", path)
    return g


def read_graph(path) -> LabeledGraph:
    p = pathlib.Path(path)
    return parse_graph_text(p.read_text(encoding="utf-8"), str(p))


def format_graph_text(g: LabeledGraph) -> str:
    """Inverse of parse_graph_text; labels must be 0..n-1."""
    n = g.max_label() + 1
    edges = g.edges()
    lines = [f"p {n} {len(edges)}"]
    lines.extend(f"e {u + 1} {v + 1}" for u, v in edges)
    return "\n".join(lines) + "\n"


def write_graph(g: LabeledGraph, path) -> None:
    pathlib.Path(path).write_text(format_graph_text(g), encoding="utf-8")


# ========= OpScript =========

@dataclass(frozen=True)
class Op:
    kind: str
    args: Tuple[int, ...]
    line_no: int = 0

    def __str__(self) -> str:
        return " ".join([self.kind] + [str(a + 1) for a in self.args])


def parse_script_text(text: str, path: str = "") -> List[Op]:
    ops = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        fields = _split_fields(raw)
        if not fields or fields[0].startswith("#"):
            continue
        kind = fields[0].upper()
        if kind not in SCRIPT_OPS:
            raise ParseError(line_no, f"unknown operation {fields[0]!r}", path)
        if len(fields) - 1 != SCRIPT_OPS[kind]:
            raise ParseError(line_no, f"{kind} takes {SCRIPT_OPS[kind]} argument(s)", path)
        try:
            args = tuple(int(x) - 1 for x in fields[1:])
        except ValueError:
            raise ParseError(line_no, "labels must be integers", path) from None
        if any(a < 0 for a in args):
            raise ParseError(line_no, "labels are 1-based", path)
        ops.append(Op(kind, args, line_no))
    return ops


def read_script(path) -> List[Op]:
    p = pathlib.Path(path)
    return parse_script_text(p.read_text(encoding="utf-8"), str(p))


def format_script(ops: Iterable[Op]) -> str:
    return "".join(f"{op}\n" for op in ops)
