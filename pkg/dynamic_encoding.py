"""Succinct dynamic encoding of a planar graph under minor operations.

Three levels hold the edges: F between global boundary vertices, one F_i per mini graph
between mini boundary vertices, and the micro graphs (table codes) for everything else.
Each edge lives in exactly one of them. Boundary duplicates are tracked through the
H-family graphs, whose edge payloads are the (piece, duplicate) tuples.

Label conventions inside a mini graph i:
    external mini label  - what φ / Φ / Φ⁻¹_i speak about; frozen boundary status
    internal mini label  - the vertex name in F_i, F′_i and the H_i graphs
    micro label          - position inside one micro graph; Φ⁻¹_{i,j} returns internal labels
"""
import logging
import time
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Tuple

from core_graph import LabeledGraph, connect_components, is_connected
from dynamic_mappings import DynInverse, HLevel, IntExtMap
from errors import (
    ConfigError,
    DeletedVertex,
    HashingModeRequired,
    InvariantViolation,
    NotAnEdge,
    SameVertex,
    UnknownVertex,
)
from forbidden_graph import ForbiddenGraph
from microtable import MicroTable, build_table
from partition import (
    DOUBLE_BOUNDARY,
    GLOBAL_BOUNDARY,
    MINI_BOUNDARY,
    LabelHierarchy,
    MicroInfo,
    MiniInfo,
    PartitionConfig,
    build_hierarchy,
)
from succinct import BitVector, CompactArray, bits_for


logger = logging.getLogger("planarsucc.dynamic_encoding")

PROBE_FACTOR = 16
WORK_COUNTERS = ("micro_merges", "inverse_rewrites", "contractions", "vertex_deletions", "edge_deletions")
DUMP_MAGIC = "PSE1"
# 表の層番号 k (<= 7) を保持するビット数
STRATUM_HEADER_BITS = 3


def _pair(a: int, b: int) -> Tuple[int, int]:
    return (a, b) if a < b else (b, a)


def _forbidden_ranges(mi: MicroInfo, x: int) -> List[Tuple[int, int]]:
    """Micro label ranges whose edges to x may not live in the micro graph."""
    color = mi.color_of(x)
    if color in (MINI_BOUNDARY, DOUBLE_BOUNDARY):
        return [(mi.mini_start, mi.size - 1)]
    if color == GLOBAL_BOUNDARY:
        return [(mi.global_start, mi.mini_start - 1), (mi.double_start, mi.size - 1)]
    return []


@dataclass
class InvariantReport:
    violations: List[str] = field(default_factory=list)
    checked: Dict[str, int] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations

    def raise_if_failed(self) -> None:
        if self.violations:
            raise InvariantViolation(self.violations[0], {"violations": list(self.violations)})


# ========= per mini graph state =========

class _MiniState:
    def __init__(self, info: MiniInfo, table: MicroTable, universe: int, hashing: bool):
        self.info = info
        bs, ds, n_i = info.boundary_start, info.double_start, info.size
        boundary = list(range(bs, n_i))
        duplicates = list(range(ds, n_i))
        self.codes = [table.encode(mi.size, mi.edges) for mi in info.micro]
        self.intext = IntExtMap(n_i, boundary)
        self.inv = DynInverse(n_i, duplicates, [info.phi_inv[x] for x in duplicates], universe - 1)
        self.micro_inv = [
            DynInverse(mi.size, range(mi.mini_start, mi.size),
                       [mi.phi_inv[y] for y in range(mi.mini_start, mi.size)], n_i - 1)
            for mi in info.micro
        ]
        self.f = ForbiddenGraph(boundary, forbidden=duplicates, universe=n_i)
        self.f_prime = ForbiddenGraph(boundary, forbidden=duplicates, universe=n_i)
        for a, b in info.f_edges:
            self.f.insert(a, b)
            if a >= ds or b >= ds:
                self.f_prime.insert(a, b)
        self.hl = HLevel(boundary, len(info.micro), n_i, with_prime=True, hashing=hashing)
        self.deg = CompactArray(len(boundary), 1, growable=True)

    def deg_of(self, x: int) -> int:
        return self.deg[x - self.info.boundary_start]

    def set_deg(self, x: int, value: int) -> None:
        self.deg[x - self.info.boundary_start] = value

    def graphs(self) -> List[ForbiddenGraph]:
        return [self.f, self.f_prime] + self.hl.graphs()


# ========= DynamicEncoding =========

class DynamicEncoding:
    def __init__(self, h: LabelHierarchy, table: MicroTable, hashing: bool = False,
                 dummy: Optional[int] = None, dummy_neighbors=()):
        self.h = h
        self.table = table
        self.hashing = hashing
        self.universe = h.universe
        self.dummy = dummy
        self.dummy_nbrs = set(dummy_neighbors)
        self._absent = set(h.absent)
        self.deleted = BitVector(self.universe, ones=h.absent)
        self.probes = 0
        self.last_probe_cost = 0
        self.counters: Counter = Counter()
        self.diag: Dict[str, object] = {}

        boundary = h.boundary.members()
        self.minis = [_MiniState(info, table, self.universe, hashing) for info in h.minis]
        self.f = ForbiddenGraph(boundary, universe=self.universe)
        for a, b in h.f_edges:
            self.f.insert(a, b)
        self.top = HLevel(boundary, len(self.minis), self.universe, hashing=hashing)
        self.deg = CompactArray(len(boundary), 1, growable=True)
        self._init_degrees()

    def _init_degrees(self) -> None:
        # Deg_i -> H^{>0} -> Deg の順に近傍を数えて初期化
        for i, st in enumerate(self.minis):
            info = st.info
            for x in range(info.boundary_start, info.size):
                for j, xm in info.phi_boundary.get(x, []):
                    mi = info.micro[j]
                    code = st.codes[j]
                    has_boundary_nbr = bool(self.table.range_neighbors(code, xm, mi.mini_start, mi.size - 1))
                    st.hl.add_tuple(x, j, xm, self.table.degree(code, xm) > 0, prime=has_boundary_nbr)
            for x in range(info.boundary_start, info.size):
                st.set_deg(x, sum(1 for _ in self._mini_neighbors(i, x)))
        for u, entries in sorted(self.h.phi_boundary.items()):
            for i, e in entries:
                self.top.add_tuple(u, i, e, self.minis[i].deg_of(e) > 0)
        for u in self.h.phi_boundary:
            self.deg[self._gidx(u)] = sum(1 for _ in self._iter_neighbors(u))
        self.probes = 0

    # --- labels ---

    def _gidx(self, u: int) -> int:
        return self.h.boundary.rank(u)

    def is_boundary(self, u: int) -> bool:
        return u in self.h.boundary

    def _check_live(self, u: int) -> None:
        if not isinstance(u, int) or u < 0 or u >= self.universe or u == self.dummy or u in self._absent:
            raise UnknownVertex(u)
        if self.deleted.get(u):
            raise DeletedVertex(u)

    def is_live(self, u: int) -> bool:
        try:
            self._check_live(u)
        except (UnknownVertex, DeletedVertex):
            return False
        return True

    def live_vertices(self) -> List[int]:
        return [u for u in range(self.universe) if self.is_live(u)]

    def _phi(self, u: int) -> List[Tuple[int, int]]:
        if u in self.h.boundary:
            return self.top.phi(u)
        return [self.h.phi_single(u)]

    def _mini_to_global(self, i: int, e: int) -> int:
        st = self.minis[i]
        if e >= st.info.double_start:
            return st.inv.get(e)
        return st.info.phi_inv[e]

    def _micro_to_internal(self, i: int, j: int, y: int) -> int:
        st = self.minis[i]
        mi = st.info.micro[j]
        if y >= mi.mini_start:
            return st.micro_inv[j].get(y)
        return mi.phi_inv[y]

    def _micro_to_global(self, i: int, j: int, y: int) -> int:
        st = self.minis[i]
        return self._mini_to_global(i, st.intext.external(self._micro_to_internal(i, j, y)))

    # ========= queries =========

    def _iter_neighbors(self, u: int) -> Iterator[int]:
        if u in self.h.boundary:
            self.probes += 1
            for x in self.f.neighbors(u):
                self.probes += 1
                yield x
            for i, e in self.top.phi_nonzero(u):
                self.probes += 1
                yield from self._mini_neighbors(i, e)
        else:
            i, e = self.h.phi_single(u)
            self.probes += 1
            yield from self._mini_neighbors(i, e)

    def _mini_neighbors(self, i: int, e: int) -> Iterator[int]:
        st = self.minis[i]
        if e >= st.info.boundary_start:
            x = st.intext.internal(e)
            for y in st.f.neighbors(x):
                self.probes += 1
                yield self._mini_to_global(i, st.intext.external(y))
            for j, xm in st.hl.phi_nonzero(x):
                self.probes += 1
                yield from self._micro_neighbors(i, j, xm)
        else:
            j, xm = st.info.phi(e)[0]
            yield from self._micro_neighbors(i, j, xm)

    def _micro_neighbors(self, i: int, j: int, xm: int) -> Iterator[int]:
        for y in self.table.neighbors(self.minis[i].codes[j], xm):
            self.probes += 1
            yield self._micro_to_global(i, j, y)

    def neighbors(self, u: int) -> List[int]:
        self._check_live(u)
        start = self.probes
        out = [x for x in self._iter_neighbors(u) if x != self.dummy]
        self.last_probe_cost = self.probes - start
        return out

    def _mini_degree(self, i: int, e: int) -> int:
        st = self.minis[i]
        if e >= st.info.boundary_start:
            return st.deg_of(st.intext.internal(e))
        j, xm = st.info.phi(e)[0]
        return self.table.degree(st.codes[j], xm)

    def _raw_degree(self, u: int) -> int:
        if u in self.h.boundary:
            return self.deg[self._gidx(u)]
        return self._mini_degree(*self.h.phi_single(u))

    def degree(self, u: int) -> int:
        self._check_live(u)
        d = self._raw_degree(u)
        return d - 1 if u in self.dummy_nbrs else d

    # ========= degree bookkeeping =========

    def _global_degree_add(self, u: int, delta: int) -> None:
        gi = self._gidx(u)
        self.deg[gi] = self.deg[gi] + delta

    def _mini_degree_changed(self, i: int, x: int, delta: int) -> None:
        st = self.minis[i]
        st.set_deg(x, st.deg_of(x) + delta)
        e = st.intext.external(x)
        if e >= st.info.double_start:
            u = st.inv.get(e)
            self._global_degree_add(u, delta)
            self.top.set_nonzero(u, i, e, st.deg_of(x) > 0)

    def _micro_degree_changed(self, i: int, j: int, y: int, delta: int) -> None:
        st = self.minis[i]
        if y < st.info.micro[j].mini_start or delta == 0:
            return
        x = st.micro_inv[j].get(y)
        st.hl.set_nonzero(x, j, y, self.table.degree(st.codes[j], y) > 0)
        self._mini_degree_changed(i, x, delta)

    def _refresh_prime(self, i: int, j: int, y: int) -> None:
        st = self.minis[i]
        mi = st.info.micro[j]
        if y < mi.mini_start:
            return
        has = bool(self.table.range_neighbors(st.codes[j], y, mi.mini_start, mi.size - 1))
        st.hl.set_prime(st.micro_inv[j].get(y), j, y, has)

    # ========= micro level =========

    def _micro_merge(self, i: int, j: int, keep: int, drop: int) -> Tuple[int, List[int]]:
        """Merge micro vertex drop into keep; returns (Δ, partners of edges pushed out)."""
        st = self.minis[i]
        mi = st.info.micro[j]
        t = self.table
        code = st.codes[j]
        before_keep, before_drop = t.degree(code, keep), t.degree(code, drop)
        watch = {}
        for x in (keep, drop):
            for y in t.range_neighbors(code, x, mi.mini_start, mi.size - 1):
                if y != keep and y != drop:
                    watch[y] = t.degree(code, y)
        code = t.merge(code, keep, drop)
        returned = []
        for lo, hi in _forbidden_ranges(mi, keep):
            if lo > hi:
                continue
            found = t.range_neighbors(code, keep, lo, hi)
            if found:
                returned.extend(found)
                code = t.batch_delete(code, keep, lo, hi)
        st.codes[j] = code
        self.counters["micro_merges"] += 1
        for y, before in watch.items():
            self._micro_degree_changed(i, j, y, t.degree(code, y) - before)
            self._refresh_prime(i, j, y)
        return t.degree(code, keep) - before_keep - before_drop, returned

    def _micro_delete(self, i: int, j: int, xm: int) -> None:
        st = self.minis[i]
        mi = st.info.micro[j]
        watch = self.table.range_neighbors(st.codes[j], xm, mi.mini_start, mi.size - 1)
        st.codes[j] = self.table.delete_vertex(st.codes[j], xm)
        for y in watch:
            self._micro_degree_changed(i, j, y, -1)
            self._refresh_prime(i, j, y)

    def _micro_label_search(self, i: int, j: int, bm: int, xa: int, allow_full_scan: bool = False) -> int:
        """Duplicate of internal mini label xa among the boundary neighbours of bm."""
        st = self.minis[i]
        mi = st.info.micro[j]
        for y in self.table.range_neighbors(st.codes[j], bm, mi.mini_start, mi.size - 1):
            self.probes += 1
            if st.micro_inv[j].get(y) == xa:
                return y
        if not allow_full_scan:
            raise InvariantViolation(
                "micro-label search found no duplicate next to the contracted vertex",
                {"piece": i, "micro": j, "vertex": bm},
            )
        self.counters["fallback_scans"] += 1
        for y in range(mi.mini_start, mi.size):
            self.probes += 1
            if not self.table.is_deleted(st.codes[j], y) and st.micro_inv[j].get(y) == xa:
                return y
        raise InvariantViolation("no duplicate in the micro graph", {"piece": i, "micro": j})

    # ========= mini level =========

    def _fi_insert(self, i: int, x: int, y: int) -> str:
        st = self.minis[i]
        if st.f.adjacent(x, y):
            return "exists"
        if not st.f.insert(x, y):
            return "forbidden"
        if (st.f.is_forbidden(x) or st.f.is_forbidden(y)) and not st.f_prime.adjacent(x, y):
            st.f_prime.insert(x, y)
        return "inserted"

    def _absorb_returned(self, i: int, j: int, keep: int, returned: List[int]) -> List[int]:
        """Move micro edges (keep, y) into F_i; returns global partners that belong in F."""
        st = self.minis[i]
        pending = []
        for y in returned:
            yx = st.micro_inv[j].get(y)
            outcome = self._fi_insert(i, keep, yx)
            if outcome == "inserted":
                self._mini_degree_changed(i, yx, +1)
            elif outcome == "forbidden":
                pending.append(self._mini_to_global(i, st.intext.external(yx)))
        return pending

    def _mini_merge(self, i: int, a: int, b: int) -> Tuple[int, List[int]]:
        """Merge external mini label b into a in piece i.

        Returns (Δ, pending) where Δ is new deg(a) - old deg(a) - old deg(b) inside P_i and
        pending lists global vertices that must be joined to the global survivor in F.
        """
        st = self.minis[i]
        info = st.info
        bs = info.boundary_start
        a_boundary, b_boundary = a >= bs, b >= bs

        if not a_boundary and not b_boundary:
            (ja, am), (jb, bm) = info.phi(a)[0], info.phi(b)[0]
            if ja != jb:
                raise InvariantViolation("M1 merge across micro graphs", {"piece": i, "labels": (a, b)})
            delta, returned = self._micro_merge(i, ja, am, bm)
            if returned:
                raise InvariantViolation("simple survivor pushed edges out", {"piece": i})
            self.counters["mini_m1"] += 1
            return delta, []

        if not a_boundary:
            raise InvariantViolation("M2 merge requested with the boundary vertex as dropped side",
                                     {"piece": i, "labels": (a, b)})

        xa = st.intext.internal(a)
        da, fa = st.deg_of(xa), st.f.degree(xa)

        if not b_boundary:
            db = self._mini_degree(i, b)
            j, bm = info.phi(b)[0]
            am = self._micro_label_search(i, j, bm, xa)
            delta_j, returned = self._micro_merge(i, j, am, bm)
            st.hl.set_nonzero(xa, j, am, self.table.degree(st.codes[j], am) > 0)
            self._refresh_prime(i, j, am)
            pending = self._absorb_returned(i, j, xa, returned)
            st.set_deg(xa, da + db + delta_j + st.f.degree(xa) - fa)
            self.counters["mini_m2"] += 1
            return st.deg_of(xa) - da - db, pending

        xb = st.intext.internal(b)
        db, fb = st.deg_of(xb), st.f.degree(xb)
        keep, drop = (xa, xb) if st.hl.size(xa) >= st.hl.size(xb) else (xb, xa)
        z_cap, z_only = st.hl.merge(keep, drop, keep)
        delta = 0
        pending = []
        for j, km, dm in z_cap:
            delta_j, returned = self._micro_merge(i, j, km, dm)
            delta += delta_j
            st.hl.set_nonzero(keep, j, km, self.table.degree(st.codes[j], km) > 0)
            self._refresh_prime(i, j, km)
            pending.extend(self._absorb_returned(i, j, keep, returned))
        for j, dm in z_only:
            st.micro_inv[j].set(dm, keep)
            self.counters["inverse_rewrites"] += 1

        keep_was_forbidden = st.f.is_forbidden(keep)
        report = st.f.merge(keep, drop, keep)
        st.f_prime.merge(keep, drop, keep)
        for x, _, _ in report.discarded_parallel:
            self._mini_degree_changed(i, x, -1)
        for x, _ in report.discarded_forbidden + report.revoked:
            self._mini_degree_changed(i, x, -1)
            pending.append(self._mini_to_global(i, st.intext.external(x)))
            if st.f_prime.adjacent(keep, x):
                st.f_prime.delete(keep, x)
        if st.f.is_forbidden(keep):
            # 元から禁止なら新しく付いた辺だけ F′ へ
            fresh = [x for x, _ in report.inserted_new] if keep_was_forbidden else st.f.neighbors(keep)
            for x in fresh:
                if st.f.adjacent(keep, x) and not st.f_prime.adjacent(keep, x):
                    st.f_prime.insert(keep, x)

        st.intext.link(a, keep)
        st.set_deg(keep, da + db + delta + st.f.degree(keep) - fa - fb)
        st.set_deg(drop, 0)
        self.counters["mini_m3"] += 1
        return st.deg_of(keep) - da - db, pending

    def _mini_label_search(self, i: int, be: int, a: int) -> int:
        """External mini label of global boundary vertex a adjacent to be in piece i."""
        st = self.minis[i]
        info = st.info
        if be >= info.boundary_start:
            for x in st.f_prime.neighbors(st.intext.internal(be)):
                self.probes += 1
                e = st.intext.external(x)
                if e >= info.double_start and st.inv.get(e) == a:
                    return e
        else:
            j, bm = info.phi(be)[0]
            mi = info.micro[j]
            for y in self.table.range_neighbors(st.codes[j], bm, mi.mini_start, mi.size - 1):
                self.probes += 1
                e = st.intext.external(st.micro_inv[j].get(y))
                if e >= info.double_start and st.inv.get(e) == a:
                    return e
        raise InvariantViolation("mini-label search found no duplicate", {"piece": i, "vertex": a})

    def _mini_delete(self, i: int, e: int) -> None:
        st = self.minis[i]
        if e >= st.info.boundary_start:
            x = st.intext.internal(e)
            for j, xm in st.hl.phi(x):
                self._micro_delete(i, j, xm)
            for y, _ in st.f.delete_vertex(x):
                self._mini_degree_changed(i, y, -1)
            st.f_prime.delete_vertex(x)
            st.hl.delete_vertex(x)
            st.set_deg(x, 0)
        else:
            j, xm = st.info.phi(e)[0]
            self._micro_delete(i, j, xm)

    # ========= global level =========

    def _absorb_pending(self, survivor: int, dropped: int, pending: List[int]) -> None:
        for x in pending:
            if x == survivor or x == dropped:
                continue
            if not self.f.adjacent(survivor, x):
                self.f.insert(survivor, x)
                self._global_degree_add(x, +1)

    def _contract_boundary(self, u: int, v: int) -> int:
        gu, gv = self._gidx(u), self._gidx(v)
        du, dv = self.deg[gu], self.deg[gv]
        fu, fv = self.f.degree(u), self.f.degree(v)
        z_cap, z_only = self.top.merge(u, v, u)
        delta = 0
        pending = []
        for i, ue, ve in z_cap:
            d, p = self._mini_merge(i, ue, ve)
            delta += d
            pending.extend(p)
            st = self.minis[i]
            self.top.set_nonzero(u, i, ue, st.deg_of(st.intext.internal(ue)) > 0)
        for i, ve in z_only:
            self.minis[i].inv.set(ve, u)
            self.counters["inverse_rewrites"] += 1
        report = self.f.merge(u, v, u)
        for x, _, _ in report.discarded_parallel:
            self._global_degree_add(x, -1)
        self._absorb_pending(u, v, pending)
        self.deg[gu] = du + dv + delta + self.f.degree(u) - fu - fv
        self.deg[gv] = 0
        self.counters["global_g3"] += 1
        return u

    def _contract_mixed(self, a: int, b: int) -> int:
        i, be = self.h.phi_single(b)
        st = self.minis[i]
        ae = self._mini_label_search(i, be, a)
        ga = self._gidx(a)
        da, fa = self.deg[ga], self.f.degree(a)
        db = self._mini_degree(i, be)
        delta, pending = self._mini_merge(i, ae, be)
        self._absorb_pending(a, b, pending)
        self.top.set_nonzero(a, i, ae, st.deg_of(st.intext.internal(ae)) > 0)
        self.deg[ga] = da + db + delta + self.f.degree(a) - fa
        self.counters["global_g2"] += 1
        return a

    def _contract_inner(self, u: int, v: int) -> int:
        i, ue = self.h.phi_single(u)
        i2, ve = self.h.phi_single(v)
        if i != i2:
            raise InvariantViolation("adjacent non-boundary vertices in different pieces", {"edge": (u, v)})
        st = self.minis[i]
        bs = st.info.boundary_start
        if ue < bs <= ve:
            # 境界側を残し、u の静的 φ をそちらへ付け替える
            _, pending = self._mini_merge(i, ve, ue)
            self.h.repoint(u, i, ve)
        else:
            _, pending = self._mini_merge(i, ue, ve)
        if pending:
            raise InvariantViolation("inner contraction produced global boundary edges", {"edge": (u, v)})
        self.counters["global_g1"] += 1
        return u

    def _require_edge(self, u: int, v: int) -> None:
        if self.hashing:
            if self._find_edge(u, v) is None:
                raise NotAnEdge(u, v)
            return
        a, b = (u, v) if self._raw_degree(u) <= self._raw_degree(v) else (v, u)
        if b not in self._iter_neighbors(a):
            raise NotAnEdge(u, v)

    def contract(self, u: int, v: int) -> int:
        """Contract edge {u, v}; returns the surviving label."""
        self._check_live(u)
        self._check_live(v)
        if u == v:
            raise SameVertex(u)
        self._require_edge(u, v)
        u_boundary, v_boundary = u in self.h.boundary, v in self.h.boundary
        if u_boundary and v_boundary:
            survivor = self._contract_boundary(u, v)
        elif u_boundary:
            survivor = self._contract_mixed(u, v)
        elif v_boundary:
            survivor = self._contract_mixed(v, u)
        else:
            survivor = self._contract_inner(u, v)
        dropped = v if survivor == u else u
        self.deleted.set(dropped)
        if dropped in self.dummy_nbrs:
            self.dummy_nbrs.discard(dropped)
            self.dummy_nbrs.add(survivor)
        self.counters["contractions"] += 1
        return survivor

    def delete_vertex(self, u: int) -> None:
        self._check_live(u)
        if u in self.h.boundary:
            for i, e in self.top.phi(u):
                self._mini_delete(i, e)
            for x, _ in self.f.delete_vertex(u):
                self._global_degree_add(x, -1)
            self.top.delete_vertex(u)
            self.deg[self._gidx(u)] = 0
        else:
            self._mini_delete(*self.h.phi_single(u))
        self.deleted.set(u)
        self.dummy_nbrs.discard(u)
        self.counters["vertex_deletions"] += 1

    # ========= hashing mode =========

    def _find_edge(self, u: int, v: int):
        """Locator of the structure that manages {u, v}, or None."""
        u_boundary, v_boundary = u in self.h.boundary, v in self.h.boundary
        if u_boundary and v_boundary:
            return ("F", u, v) if self.f.adjacent(u, v) else None
        if u_boundary:
            u, v = v, u
            v_boundary = True
        i, ue = self.h.phi_single(u)
        if v_boundary:
            ve = self.top.lookup(v, i)
            if ve is None:
                return None
        else:
            i2, ve = self.h.phi_single(v)
            if i2 != i:
                return None
        return self._find_mini_edge(i, ue, ve)

    def _find_mini_edge(self, i: int, a: int, b: int):
        st = self.minis[i]
        bs = st.info.boundary_start
        if a >= bs and b >= bs:
            xa, xb = st.intext.internal(a), st.intext.internal(b)
            return ("Fi", i, xa, xb) if st.f.adjacent(xa, xb) else None
        if a >= bs:
            a, b = b, a
        j, am = st.info.phi(a)[0]
        if b >= bs:
            bm = st.hl.lookup(st.intext.internal(b), j)
            if bm is None:
                return None
        else:
            jb, bm = st.info.phi(b)[0]
            if jb != j:
                return None
        return ("micro", i, j, am, bm) if self.table.adjacent(st.codes[j], am, bm) else None

    def adjacent(self, u: int, v: int) -> bool:
        if not self.hashing:
            raise HashingModeRequired("adjacent")
        self._check_live(u)
        self._check_live(v)
        if u == v:
            return False
        return self._find_edge(u, v) is not None

    def delete_edge(self, u: int, v: int) -> None:
        if not self.hashing:
            raise HashingModeRequired("delete_edge")
        self._check_live(u)
        self._check_live(v)
        if u == v:
            raise SameVertex(u)
        loc = self._find_edge(u, v)
        if loc is None:
            raise NotAnEdge(u, v)
        if loc[0] == "F":
            self.f.delete(u, v)
            self._global_degree_add(u, -1)
            self._global_degree_add(v, -1)
        elif loc[0] == "Fi":
            _, i, xa, xb = loc
            st = self.minis[i]
            st.f.delete(xa, xb)
            if st.f_prime.adjacent(xa, xb):
                st.f_prime.delete(xa, xb)
            self._mini_degree_changed(i, xa, -1)
            self._mini_degree_changed(i, xb, -1)
        else:
            _, i, j, am, bm = loc
            st = self.minis[i]
            st.codes[j] = self.table.batch_delete(st.codes[j], am, bm, bm)
            for y in (am, bm):
                self._micro_degree_changed(i, j, y, -1)
                self._refresh_prime(i, j, y)
        self.counters["edge_deletions"] += 1

    # ========= instrumentation =========

    def forbidden_graphs(self) -> List[Tuple[str, ForbiddenGraph]]:
        out = [("F", self.f)] + [(f"H/{k}", g) for k, g in enumerate(self.top.graphs())]
        for i, st in enumerate(self.minis):
            out.extend((f"P{i}/{k}", g) for k, g in enumerate(st.graphs()))
        return out

    def work_breakdown(self) -> Dict[str, int]:
        relinks = self.f.relinks + self.top.relinks()
        relinks += sum(st.f.relinks + st.f_prime.relinks + st.hl.relinks() for st in self.minis)
        out = {
            "probes": self.probes,
            "relinks": relinks,
            "graph_merges": sum(g.merges for _, g in self.forbidden_graphs()),
            "table_lazy_hits": self.table.lazy_hits,
        }
        for key in WORK_COUNTERS:
            out[key] = self.counters[key]
        return out

    def total_work(self) -> int:
        work = self.work_breakdown()
        return work["probes"] + work["relinks"] + sum(work[k] for k in WORK_COUNTERS)

    def to_graph(self) -> LabeledGraph:
        live = self.live_vertices()
        g = LabeledGraph(live)
        for u in live:
            for x in self.neighbors(u):
                if u < x and not g.has_edge(u, x):
                    g.add_edge(u, x)
        return g

    # ========= invariants =========

    def _edge_owners(self, report: InvariantReport) -> Counter:
        owners: Counter = Counter()
        for a, b, _ in self.f.edges():
            if a not in self.h.boundary or b not in self.h.boundary:
                report.violations.append(f"F edge {{{a}, {b}}} has a non-boundary endpoint")
            owners[_pair(a, b)] += 1
        for i, st in enumerate(self.minis):
            info = st.info
            for x, y, _ in st.f.edges():
                ex, ey = st.intext.external(x), st.intext.external(y)
                if ex < info.boundary_start or ey < info.boundary_start:
                    report.violations.append(f"F_{i} edge {{{ex}, {ey}}} leaves the mini boundary")
                if ex >= info.double_start and ey >= info.double_start:
                    report.violations.append(f"F_{i} edge {{{ex}, {ey}}} joins two global boundary duplicates")
                owners[_pair(self._mini_to_global(i, ex), self._mini_to_global(i, ey))] += 1
            for j, mi in enumerate(info.micro):
                for a, b in self.table.decode(st.codes[j]):
                    if b == mi.dummy:
                        continue
                    if a >= mi.mini_start and b >= mi.mini_start:
                        report.violations.append(f"micro ({i},{j}) edge {{{a}, {b}}} joins two boundary duplicates")
                    owners[_pair(self._micro_to_global(i, j, a), self._micro_to_global(i, j, b))] += 1
        for e, c in owners.items():
            if c != 1:
                report.violations.append(f"edge {e} is managed by {c} structures")
        return owners

    def _check_mini_state(self, i: int, st: _MiniState, report: InvariantReport) -> None:
        info = st.info
        expected_prime = {(x, y) for x, y, _ in st.f.edges() if st.f.is_forbidden(x) or st.f.is_forbidden(y)}
        actual_prime = {(x, y) for x, y, _ in st.f_prime.edges()}
        if expected_prime != actual_prime:
            report.violations.append(f"F′_{i} differs from the forbidden-incident edges of F_{i}")
        for x in st.f.vertices():
            tuples = st.hl.phi(x)
            micro_total = 0
            nonzero, prime = set(), set()
            for j, xm in tuples:
                mi = info.micro[j]
                d = self.table.degree(st.codes[j], xm)
                micro_total += d
                if d > 0:
                    nonzero.add((j, xm))
                if self.table.range_neighbors(st.codes[j], xm, mi.mini_start, mi.size - 1):
                    prime.add((j, xm))
                if st.micro_inv[j].get(xm) != x:
                    report.violations.append(f"Φ⁻¹_({i},{j})({xm}) does not return internal label {x}")
            if set(st.hl.phi_nonzero(x)) != nonzero:
                report.violations.append(f"H_{i}^>0 of {x} disagrees with micro degrees")
            if set(st.hl.phi_prime(x)) != prime:
                report.violations.append(f"H′_{i} of {x} disagrees with micro neighbourhoods")
            if st.deg_of(x) != st.f.degree(x) + micro_total:
                report.violations.append(f"Deg_{i}[{x}]={st.deg_of(x)} but counts {st.f.degree(x) + micro_total}")
            e = st.intext.external(x)
            if st.intext.internal(e) != x:
                report.violations.append(f"internal/external maps of piece {i} disagree on {x}")

    def check_invariants(self, oracle: Optional[LabeledGraph] = None) -> InvariantReport:
        """Full scan of the edge-singleton, non-zero-degree, translation and degree invariants."""
        report = InvariantReport()
        saved_probes, saved_cost = self.probes, self.last_probe_cost
        for name, g in self.forbidden_graphs():
            report.violations.extend(f"{name}: {p}" for p in g.check())
        for u in self.f.vertices():
            if u not in self.h.boundary:
                report.violations.append(f"F holds non-boundary vertex {u}")
        owners = self._edge_owners(report)
        for i, st in enumerate(self.minis):
            self._check_mini_state(i, st, report)

        live = self.live_vertices()
        worst_cost = 0
        for u in live:
            try:
                entries = self._phi(u)
                for i, e in entries:
                    if self._mini_to_global(i, e) != u:
                        report.violations.append(f"({i}, {e}) does not translate back to {u}")
                if u in self.h.boundary:
                    expected = {(i, e) for i, e in entries if self._mini_degree(i, e) > 0}
                    if set(self.top.phi_nonzero(u)) != expected:
                        report.violations.append(f"H^>0 of {u} disagrees with mini degrees")
                    counted = self.f.degree(u) + sum(self._mini_degree(i, e) for i, e in entries)
                    if self.deg[self._gidx(u)] != counted:
                        report.violations.append(f"Deg[{u}]={self.deg[self._gidx(u)]} but counts {counted}")
                nbrs = self.neighbors(u)
                worst_cost = max(worst_cost, self.last_probe_cost - PROBE_FACTOR * (len(nbrs) + 1))
                if len(nbrs) != len(set(nbrs)):
                    report.violations.append(f"neighbours of {u} repeat")
                if self.degree(u) != len(nbrs):
                    report.violations.append(f"degree({u})={self.degree(u)} but {len(nbrs)} neighbours")
                if oracle is not None and u in oracle and set(nbrs) != oracle.neighbor_set(u):
                    report.violations.append(f"neighbours of {u} differ from the oracle")
            except (KeyError, ValueError, IndexError, InvariantViolation) as exc:
                report.violations.append(f"vertex {u}: {type(exc).__name__}: {exc}")
        if worst_cost > 0:
            report.violations.append(f"neighbourhood probes exceed {PROBE_FACTOR}·(deg+1) by {worst_cost}")
        if oracle is not None and set(live) != oracle.vertex_set:
            report.violations.append("live vertex set differs from the oracle")
        report.checked = {"vertices": len(live), "edges": len(owners), "pieces": len(self.minis)}
        self.probes, self.last_probe_cost = saved_probes, saved_cost
        return report

    # ========= reports =========

    def space_report(self) -> Dict[str, float]:
        """Bits per structure class.

        side: global level (δG dictionary, Deg, piece starts of the label order, per-piece
        headers). mini: per-piece maps, Deg_i and the duplicate Φ⁻¹. micro: stratum indices
        and headers plus the per-micro Φ⁻¹. label: the label <-> slot permutation, which only
        a labeled input needs; it is left out of the total.
        """
        micro_index = 0
        headers = 0
        micro_maps = 0
        mini = 0
        side = self.h.boundary.size_in_bits() + self.deg.size_in_bits() + self.h.labels.size_in_bits()
        for st in self.minis:
            info = st.info
            side += 3 * bits_for(max(info.size, 1))
            for mi, (k, _) in zip(info.micro, st.codes):
                micro_index += self.table.index_width(k)
                headers += STRATUM_HEADER_BITS
                micro_maps += mi.phi_inv.size_in_bits() + 4 * bits_for(max(mi.size, 1))
            mini += info.phi_piece.size_in_bits() + info.phi_label.size_in_bits()
            mini += st.intext.size_in_bits() + st.inv.size_in_bits() + st.deg.size_in_bits()
            mini += sum(d.size_in_bits() for d in st.micro_inv)
        graph_bits = 0
        for _, g in self.forbidden_graphs():
            graph_bits += 2 * g.edge_count() * bits_for(max(g.universe, 1))
        label_bits = self.h.labels.naming_bits()
        n = max(len(self.live_vertices()), 1)
        micro = micro_index + headers + micro_maps
        return {
            "micro_index_bits": micro_index,
            "micro_header_bits": headers,
            "micro_map_bits": micro_maps,
            "mini_bits": mini,
            "side_bits": side,
            "boundary_graph_bits": graph_bits,
            "label_bits": label_bits,
            "micro_bits_per_vertex": micro / n,
            "mini_bits_per_vertex": mini / n,
            "side_bits_per_vertex": side / n,
            "label_bits_per_vertex": label_bits / n,
            "total_bits_per_vertex": (micro + mini + side + graph_bits) / n,
        }

    def dump(self) -> str:
        lines = [f"{DUMP_MAGIC} {self.universe} {len(self.minis)}"]
        lines.append("F " + " ".join(f"{a}-{b}" for a, b, _ in self.f.edges()))
        for i, st in enumerate(self.minis):
            codes = " ".join(f"{k}:{idx}" for k, idx in st.codes)
            lines.append(f"P {i} micro {codes}")
            lines.append(f"P {i} F " + " ".join(f"{a}-{b}" for a, b, _ in st.f.edges()))
        return "\n".join(lines) + "\n"

    def inject_fault(self) -> str:
        """Corrupt one stored degree (or one micro graph when there is no boundary)."""
        for u in self.h.boundary.members():
            if self.is_live(u):
                self._global_degree_add(u, +1)
                return f"Deg[{u}] += 1"
        for i, st in enumerate(self.minis):
            for x in st.f.vertices():
                st.set_deg(x, st.deg_of(x) + 1)
                return f"Deg_{i}[{x}] += 1"
        for i, st in enumerate(self.minis):
            for j, code in enumerate(st.codes):
                edges = [(a, b) for a, b in self.table.decode(code) if b != st.info.micro[j].dummy]
                if edges:
                    a, b = edges[0]
                    st.codes[j] = self.table.batch_delete(code, a, b, b)
                    return f"micro ({i},{j}) lost edge {{{a}, {b}}}"
        return "nothing to corrupt"


# ========= build =========

def build_encoding(g: LabeledGraph, cfg: Optional[PartitionConfig] = None, table: Optional[MicroTable] = None,
                   hashing: bool = False) -> DynamicEncoding:
    """Partition g, fill every structure and count the initial degrees."""
    cfg = cfg or PartitionConfig()
    if len(g) == 0:
        raise ConfigError("cannot encode an empty graph", {"n": 0})
    started = time.perf_counter()
    work = g
    dummy = None
    dummy_nbrs: List[int] = []
    if not is_connected(g):
        work = g.copy()
        dummy = connect_components(work)
        dummy_nbrs = work.neighbors(dummy)
        logger.debug("【診断】added dummy vertex %d for %d components", dummy, len(dummy_nbrs))
    if table is None or table.r_prime < cfg.r_prime:
        table = build_table(cfg.r_prime)
    _, _, h = build_hierarchy(work, cfg)
    enc = DynamicEncoding(h, table, hashing=hashing, dummy=dummy, dummy_neighbors=dummy_nbrs)
    enc.diag = {
        "n": len(g),
        "m": g.edge_count(),
        "r": cfg.r,
        "r_prime": cfg.r_prime,
        "dummy": dummy,
        "build_seconds": time.perf_counter() - started,
        **h.stats,
    }
    logger.info("built encoding n=%d m=%d pieces=%d micro=%d |δG|=%d", enc.diag["n"], enc.diag["m"],
                h.stats["pieces"], h.stats["micro_graphs"], h.stats["global_boundary"])
    return enc


# ========= entry points =========

def neighbors(enc: DynamicEncoding, u: int) -> List[int]:
    return enc.neighbors(u)


def degree(enc: DynamicEncoding, u: int) -> int:
    return enc.degree(u)


def contract(enc: DynamicEncoding, u: int, v: int) -> int:
    return enc.contract(u, v)


def delete_vertex(enc: DynamicEncoding, u: int) -> None:
    enc.delete_vertex(u)


def adjacent(enc: DynamicEncoding, u: int, v: int) -> bool:
    return enc.adjacent(u, v)


def delete_edge(enc: DynamicEncoding, u: int, v: int) -> None:
    enc.delete_edge(u, v)


def check_invariants(enc: DynamicEncoding, oracle: Optional[LabeledGraph] = None) -> InvariantReport:
    return enc.check_invariants(oracle)


def space_report(enc: DynamicEncoding) -> Dict[str, float]:
    return enc.space_report()


def dump_encoding(enc: DynamicEncoding) -> str:
    return enc.dump()


def inject_fault(enc: DynamicEncoding) -> str:
    return enc.inject_fault()
