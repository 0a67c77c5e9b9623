"""Two-level r / r' partition and the global / mini / micro label hierarchy."""
import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from core_graph import LabeledGraph, is_connected
from errors import ConfigError, NotBoundary, NotConnected
from succinct import CompactArray, IndexableDictionary, bits_for


logger = logging.getLogger("planarsucc.partition")

DEFAULT_R = 64
DEFAULT_R_PRIME = 4
MAX_R_PRIME = 6
SIZE_CAP_MULTIPLIER = 2

SIMPLE, GLOBAL_BOUNDARY, MINI_BOUNDARY, DOUBLE_BOUNDARY = 0, 1, 2, 3
COLOR_NAMES = ("simple", "global-boundary", "mini-boundary", "double-boundary")

Edge = Tuple[int, int]


@dataclass(frozen=True)
class PartitionConfig:
    r: int = DEFAULT_R
    r_prime: int = DEFAULT_R_PRIME
    size_cap_multiplier: int = SIZE_CAP_MULTIPLIER

    def __post_init__(self):
        if self.r_prime < 2:
            raise ConfigError(f"r_prime must be at least 2 (got {self.r_prime})", {"r_prime": self.r_prime})
        if self.r_prime > MAX_R_PRIME:
            raise ConfigError(f"r_prime must be at most {MAX_R_PRIME} (got {self.r_prime})", {"r_prime": self.r_prime})
        if self.r < self.r_prime:
            raise ConfigError(f"r={self.r} must be at least r_prime={self.r_prime}", {"r": self.r})
        if self.size_cap_multiplier < 1:
            raise ConfigError("size_cap_multiplier must be positive", {"c": self.size_cap_multiplier})

    @classmethod
    def scaled(cls, n: int, r_prime: int = DEFAULT_R_PRIME) -> "PartitionConfig":
        """r = (bit length of n)², never below the default."""
        return cls(r=max(DEFAULT_R, bits_for(max(n, 1)) ** 2), r_prime=r_prime)


# ========= splitting =========

def _components(vs: List[int], adj: Dict[int, List[int]]) -> List[List[int]]:
    seen = set()
    comps = []
    for s in vs:
        if s in seen:
            continue
        seen.add(s)
        comp = [s]
        queue = deque([s])
        while queue:
            x = queue.popleft()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    comp.append(y)
                    queue.append(y)
        comps.append(sorted(comp))
    return comps


def _bfs_levels(adj: Dict[int, List[int]], root: int) -> List[List[int]]:
    level = {root: 0}
    levels = [[root]]
    queue = deque([root])
    while queue:
        x = queue.popleft()
        for y in sorted(adj[x]):
            if y not in level:
                level[y] = level[x] + 1
                if level[y] == len(levels):
                    levels.append([])
                levels[level[y]].append(y)
                queue.append(y)
    return levels


def _pack_components(comps, es, cap, out, work) -> None:
    comp_of = {}
    for ci, comp in enumerate(comps):
        for x in comp:
            comp_of[x] = ci
    comp_edges = [[] for _ in comps]
    for a, b in es:
        comp_edges[comp_of[a]].append((a, b))
    bins: List[Tuple[List[int], List[Edge]]] = []
    for ci in sorted(range(len(comps)), key=lambda c: (-len(comps[c]), comps[c][0])):
        comp = comps[ci]
        if len(comp) > cap:
            work.append((comp, comp_edges[ci]))
            continue
        for vs, bes in bins:
            if len(vs) + len(comp) <= cap:
                vs.extend(comp)
                bes.extend(comp_edges[ci])
                break
        else:
            bins.append((list(comp), list(comp_edges[ci])))
    out.extend((sorted(vs), bes) for vs, bes in bins)


def _chunk_edges(levels: List[List[int]], es: List[Edge], cap: int) -> List[Tuple[List[int], List[Edge]]]:
    pos = {x: i for i, x in enumerate(x for lv in levels for x in lv)}
    ordered = sorted(es, key=lambda e: (max(pos[e[0]], pos[e[1]]), min(pos[e[0]], pos[e[1]])))
    chunks = []
    cur_vs, cur_es = set(), []
    for a, b in ordered:
        grow = {a, b} - cur_vs
        if cur_es and len(cur_vs) + len(grow) > cap:
            chunks.append((sorted(cur_vs), cur_es))
            cur_vs, cur_es = set(), []
        cur_vs.update((a, b))
        cur_es.append((a, b))
    if cur_es:
        chunks.append((sorted(cur_vs), cur_es))
    return chunks


def _level_split(levels: List[List[int]], es: List[Edge]):
    sizes = [len(lv) for lv in levels]
    total = sum(sizes)
    best_t, best_cost, before = 1, None, sizes[0]
    for t in range(1, len(levels) - 1):
        after = total - before - sizes[t]
        cost = max(before, after) + sizes[t]
        if best_cost is None or cost < best_cost:
            best_t, best_cost = t, cost
        before += sizes[t]
    t = best_t
    level_of = {x: li for li, lv in enumerate(levels) for x in lv}
    a_edges, b_edges = [], []
    b_vertices = set()
    for a, b in es:
        la, lb = level_of[a], level_of[b]
        if min(la, lb) < t or (la == t and lb == t):
            a_edges.append((a, b))
        else:
            b_edges.append((a, b))
            b_vertices.update((a, b))
    a_vertices = sorted(x for x, li in level_of.items() if li <= t)
    b_vertices.update(x for x, li in level_of.items() if li > t)
    return (a_vertices, a_edges), (sorted(b_vertices), b_edges)


def split_pieces(vertices: List[int], edges: List[Edge], cap: int) -> List[Tuple[List[int], List[Edge]]]:
    """Cut (vertices, edges) into edge-disjoint pieces of at most cap vertices.

    Disconnected parts are packed first-fit by component; a connected part is cut at the
    BFS level (from a far vertex) that balances both sides, or chunked edge by edge in
    BFS order when the BFS has fewer than three levels.
    """
    if cap < 2:
        raise ConfigError(f"piece cap {cap} is below 2", {"cap": cap})
    out = []
    work = [(sorted(vertices), list(edges))]
    while work:
        vs, es = work.pop()
        if len(vs) <= cap:
            out.append((vs, es))
            continue
        adj = {x: [] for x in vs}
        for a, b in es:
            adj[a].append(b)
            adj[b].append(a)
        comps = _components(vs, adj)
        if len(comps) > 1:
            _pack_components(comps, es, cap, out, work)
            continue
        far = _bfs_levels(adj, vs[0])[-1][0]
        levels = _bfs_levels(adj, far)
        if len(levels) < 3:
            out.extend(_chunk_edges(levels, es, cap))
            continue
        side_a, side_b = _level_split(levels, es)
        work.append(side_b)
        work.append(side_a)
    out.sort(key=lambda p: (p[0][0] if p[0] else -1, len(p[1])))
    return out


# ========= RPartition =========

@dataclass
class Piece:
    vertices: List[int]
    edges: List[Edge]


@dataclass
class RPartition:
    pieces: List[Piece]
    boundary: set
    piece_boundary: List[set]
    cap: int

    def piece_count(self) -> int:
        return len(self.pieces)


def _as_partition(raw, cap: int) -> RPartition:
    pieces = [Piece(vs, es) for vs, es in raw]
    seen, boundary = set(), set()
    for p in pieces:
        for x in p.vertices:
            if x in seen:
                boundary.add(x)
            seen.add(x)
    return RPartition(pieces, boundary, [set(p.vertices) & boundary for p in pieces], cap)


def build_rpartition(g: LabeledGraph, r: int, size_cap_multiplier: int = SIZE_CAP_MULTIPLIER) -> RPartition:
    if not is_connected(g):
        raise NotConnected("r-partition needs a connected graph", {"n": len(g)})
    cap = size_cap_multiplier * r
    part = _as_partition(split_pieces(g.vertices(), g.edges(), cap), cap)
    logger.debug("【診断】build_rpartition r=%d pieces=%d boundary=%d", r, part.piece_count(), len(part.boundary))
    return part


# ========= LabelOrder =========

class LabelOrder:
    """Non-boundary global labels laid out piece by piece.

    Slot start_i + x holds the global label whose mini label in piece i is x, for every x
    below the piece's double_start, so φ and Φ⁻¹ of those labels are slot arithmetic.
    The label <-> slot permutation names the vertices of a labeled input and is counted
    apart from the side structures.
    """

    def __init__(self, universe: int, blocks: List[List[int]]):
        slots = [u for block in blocks for u in block]
        starts, nonempty, at = [], [], 0
        for i, block in enumerate(blocks):
            starts.append(at)
            if block:
                nonempty.append(i)
            at += len(block)
        self.piece_start = CompactArray.from_values(starts, max_value=max(len(slots), 1))
        self.block_start = IndexableDictionary(len(slots), [starts[i] for i in nonempty])
        self.block_piece = CompactArray.from_values(nonempty, max_value=max(len(blocks) - 1, 0))
        self.label_at = CompactArray.from_values(slots, max_value=max(universe - 1, 0))
        self.slot_of = CompactArray(universe, bits_for(max(len(slots) - 1, 0)))
        for s, u in enumerate(slots):
            self.slot_of[u] = s

    def locate(self, u: int) -> Tuple[int, int]:
        s = self.slot_of[u]
        b = self.block_start.rank(s + 1) - 1
        return (self.block_piece[b], s - self.block_start.select(b))

    def label(self, piece: int, x: int) -> int:
        return self.label_at[self.piece_start[piece] + x]

    def move(self, u: int, piece: int, x: int) -> None:
        s = self.piece_start[piece] + x
        self.slot_of[u] = s
        self.label_at[s] = u

    def size_in_bits(self) -> int:
        return self.piece_start.size_in_bits() + self.block_start.size_in_bits() + self.block_piece.size_in_bits()

    def naming_bits(self) -> int:
        return self.slot_of.size_in_bits() + self.label_at.size_in_bits()


class _MiniInverse:
    """Φ⁻¹_i: label order below double_start, the piece's own array for duplicates."""

    def __init__(self, mini: "MiniInfo"):
        self.mini = mini

    def __getitem__(self, x: int) -> int:
        m = self.mini
        if x >= m.double_start:
            return m.dup_inv[x - m.double_start]
        return m.labels.label(m.index, x)

    def __len__(self) -> int:
        return self.mini.size


# ========= LabelHierarchy =========

@dataclass
class MicroInfo:
    index: int
    size: int
    # 各色の先頭ラベル: simple, global-boundary, mini-boundary, double-boundary
    color_starts: Tuple[int, int, int, int]
    phi_inv: CompactArray
    edges: List[Edge]

    @property
    def k(self) -> int:
        return self.size + 1

    @property
    def dummy(self) -> int:
        return self.size

    @property
    def mini_start(self) -> int:
        return self.color_starts[MINI_BOUNDARY]

    @property
    def global_start(self) -> int:
        return self.color_starts[GLOBAL_BOUNDARY]

    @property
    def double_start(self) -> int:
        return self.color_starts[DOUBLE_BOUNDARY]

    def color_of(self, x: int) -> int:
        for c in (DOUBLE_BOUNDARY, MINI_BOUNDARY, GLOBAL_BOUNDARY):
            if x >= self.color_starts[c]:
                return c
        return SIMPLE


@dataclass
class MiniInfo:
    index: int
    size: int
    boundary_start: int
    double_start: int
    dup_inv: CompactArray
    phi_piece: CompactArray
    phi_label: CompactArray
    phi_boundary: Dict[int, List[Tuple[int, int]]]
    micro: List[MicroInfo]
    f_edges: List[Edge]
    inner: Optional[RPartition] = None
    labels: Optional[LabelOrder] = None

    @property
    def phi_inv(self) -> _MiniInverse:
        return _MiniInverse(self)

    def is_boundary(self, x: int) -> bool:
        return x >= self.boundary_start

    def phi(self, x: int) -> List[Tuple[int, int]]:
        if x >= self.boundary_start:
            return list(self.phi_boundary.get(x, []))
        return [(self.phi_piece[x], self.phi_label[x])]


@dataclass
class LabelHierarchy:
    universe: int
    absent: List[int]
    boundary: IndexableDictionary
    labels: LabelOrder
    phi_boundary: Dict[int, List[Tuple[int, int]]]
    minis: List[MiniInfo]
    f_edges: List[Edge]
    outer: Optional[RPartition] = None
    stats: Dict[str, int] = field(default_factory=dict)

    def is_boundary(self, u: int) -> bool:
        return u in self.boundary

    def phi(self, u: int) -> List[Tuple[int, int]]:
        if u in self.boundary:
            return list(self.phi_boundary[u])
        return [self.labels.locate(u)]

    def phi_single(self, u: int) -> Tuple[int, int]:
        if u in self.boundary:
            raise NotBoundary(f"{u} is a global boundary vertex", {"vertex": u})
        return self.labels.locate(u)

    def repoint(self, u: int, piece: int, mini_label: int) -> None:
        self.labels.move(u, piece, mini_label)

    def phi_inv(self, i: int, x: int) -> int:
        return self.minis[i].phi_inv[x]

    def phi_i(self, i: int, x: int) -> List[Tuple[int, int]]:
        return self.minis[i].phi(x)

    def phi_inv_ij(self, i: int, j: int, x: int) -> int:
        return self.minis[i].micro[j].phi_inv[x]


def _color_rank(u: int, delta: set, mini_boundary: set) -> int:
    if u in delta:
        return DOUBLE_BOUNDARY if u in mini_boundary else GLOBAL_BOUNDARY
    return MINI_BOUNDARY if u in mini_boundary else SIMPLE


def _build_mini(i: int, piece: Piece, global_boundary: set, universe: int, cfg: PartitionConfig):
    delta = {u for u in piece.vertices if u in global_boundary}
    local_edges = [(a, b) for a, b in piece.edges if not (a in delta and b in delta)]
    inner = _as_partition(split_pieces(piece.vertices, local_edges, cfg.r_prime), cfg.r_prime)
    # 大域境界の複製は必ずミニ境界へ昇格
    mini_boundary = inner.boundary | delta

    order = (sorted(u for u in piece.vertices if u not in mini_boundary)
             + sorted(mini_boundary - delta) + sorted(delta))
    mini_of = {u: x for x, u in enumerate(order)}
    boundary_start = len(piece.vertices) - len(mini_boundary)
    double_start = len(piece.vertices) - len(delta)

    f_edges = []
    micros = []
    phi_piece = [0] * len(order)
    phi_label = [0] * len(order)
    phi_boundary: Dict[int, List[Tuple[int, int]]] = {x: [] for x in range(boundary_start, len(order))}
    for j, sub in enumerate(inner.pieces):
        ranked = sorted(sub.vertices, key=lambda u: (_color_rank(u, delta, mini_boundary), mini_of[u]))
        micro_of = {u: y for y, u in enumerate(ranked)}
        starts = []
        for c in (SIMPLE, GLOBAL_BOUNDARY, MINI_BOUNDARY, DOUBLE_BOUNDARY):
            first = next((y for y, u in enumerate(ranked) if _color_rank(u, delta, mini_boundary) >= c), len(ranked))
            starts.append(first)
        micro_edges = []
        for a, b in sub.edges:
            if a in mini_boundary and b in mini_boundary:
                f_edges.append(tuple(sorted((mini_of[a], mini_of[b]))))
            else:
                micro_edges.append(tuple(sorted((micro_of[a], micro_of[b]))))
        for u in ranked:
            x = mini_of[u]
            if x >= boundary_start:
                phi_boundary[x].append((j, micro_of[u]))
            else:
                phi_piece[x], phi_label[x] = j, micro_of[u]
        micros.append(MicroInfo(
            index=j,
            size=len(ranked),
            color_starts=tuple(starts),
            phi_inv=CompactArray.from_values([mini_of[u] for u in ranked], max_value=max(len(order) - 1, 0)),
            edges=sorted(micro_edges),
        ))
    n_micro = max(len(inner.pieces) - 1, 0)
    mini = MiniInfo(
        index=i,
        size=len(order),
        boundary_start=boundary_start,
        double_start=double_start,
        dup_inv=CompactArray.from_values(order[double_start:], max_value=max(universe - 1, 0)),
        phi_piece=CompactArray.from_values(phi_piece, max_value=n_micro),
        phi_label=CompactArray.from_values(phi_label, max_value=max(cfg.r_prime - 1, 0)),
        phi_boundary=phi_boundary,
        micro=micros,
        f_edges=sorted(set(f_edges)),
        inner=inner,
    )
    return mini, mini_of


def build_hierarchy(g: LabeledGraph, cfg: PartitionConfig):
    """Outer partition at r, inner partitions at r', labels and static maps.

    Returns (outer, inners, hierarchy).  Edges between two global boundary vertices go to
    `hierarchy.f_edges`; edges between two mini boundary vertices of a piece go to that
    piece's `f_edges`; everything else belongs to exactly one micro graph.
    """
    outer = build_rpartition(g, cfg.r, cfg.size_cap_multiplier)
    universe = g.max_label() + 1
    present = g.vertex_set
    absent = [x for x in range(universe) if x not in present]
    delta_g = outer.boundary

    f_edges = sorted({(a, b) for p in outer.pieces for a, b in p.edges if a in delta_g and b in delta_g})
    minis = []
    blocks: List[List[int]] = []
    phi_boundary: Dict[int, List[Tuple[int, int]]] = {u: [] for u in delta_g}
    for i, piece in enumerate(outer.pieces):
        mini, mini_of = _build_mini(i, piece, delta_g, universe, cfg)
        minis.append(mini)
        block = [0] * mini.double_start
        for u, x in mini_of.items():
            if u in delta_g:
                phi_boundary[u].append((i, x))
            else:
                block[x] = u
        blocks.append(block)

    labels = LabelOrder(universe, blocks)
    for m in minis:
        m.labels = labels
    h = LabelHierarchy(
        universe=universe,
        absent=absent,
        boundary=IndexableDictionary(universe, sorted(delta_g)),
        labels=labels,
        phi_boundary=phi_boundary,
        minis=minis,
        f_edges=f_edges,
        outer=outer,
    )
    h.stats = {
        "pieces": len(minis),
        "micro_graphs": sum(len(m.micro) for m in minis),
        "global_boundary": len(delta_g),
        "mini_boundary_total": sum(m.size - m.boundary_start for m in minis),
        "f_edges": len(f_edges),
        "fi_edges": sum(len(m.f_edges) for m in minis),
    }
    for m in minis:
        logger.debug("【診断】piece %d: |V|=%d |δP|=%d micro=%d", m.index, m.size, m.size - m.boundary_start, len(m.micro))
    return outer, [m.inner for m in minis], h


def hierarchy_edges(h: LabelHierarchy) -> List[Edge]:
    """Every edge held by the static hierarchy, translated to global labels (with repeats)."""
    out = list(h.f_edges)
    for m in h.minis:
        for a, b in m.f_edges:
            out.append(tuple(sorted((m.phi_inv[a], m.phi_inv[b]))))
        for mi in m.micro:
            for a, b in mi.edges:
                ga = m.phi_inv[mi.phi_inv[a]]
                gb = m.phi_inv[mi.phi_inv[b]]
                out.append(tuple(sorted((ga, gb))))
    return out


def format_hierarchy(h: LabelHierarchy) -> str:
    lines = [f"universe {h.universe} pieces {len(h.minis)} boundary {len(h.boundary)}"]
    for m in h.minis:
        glob = [m.phi_inv[x] for x in range(m.size)]
        lines.append(f"piece {m.index} size {m.size} boundary_start {m.boundary_start} double_start {m.double_start}")
        lines.append("  mini->global " + " ".join(map(str, glob)))
        for mi in m.micro:
            minis = [mi.phi_inv[y] for y in range(mi.size)]
            starts = " ".join(map(str, mi.color_starts))
            lines.append(f"  micro {mi.index} size {mi.size} colors [{starts}] micro->mini {' '.join(map(str, minis))}")
    return "\n".join(lines) + "\n"
