"""Dynamic simple graph with a forbidden vertex set B and free-assignment merges."""
import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Tuple

from errors import DeletedVertex, EdgeExists, NotAnEdge, SameVertex, UnknownVertex
from succinct import BitVector


logger = logging.getLogger("planarsucc.forbidden_graph")


@dataclass
class MergeReport:
    """Outcome of merging `dropped` into `survivor`, seen from the requested pair.

    discarded_parallel: (x, kept payload, discarded payload) for x in N(survivor) ∩ N(dropped)
    inserted_new:       (x, payload) for x in N(dropped) \\ N(survivor) now attached to survivor
    discarded_forbidden:(x, payload) for x in N(dropped) dropped because it would be a B–B edge
    revoked:            (x, payload) for survivor edges that became B–B because dropped was in B
    """

    survivor: int
    dropped: int
    contracted: bool = False
    discarded_parallel: List[Tuple[int, object, object]] = field(default_factory=list)
    inserted_new: List[Tuple[int, object]] = field(default_factory=list)
    discarded_forbidden: List[Tuple[int, object]] = field(default_factory=list)
    revoked: List[Tuple[int, object]] = field(default_factory=list)


class ForbiddenGraph:
    """Adjacency maps over internal ids, addressed through external labels.

    The internal merge always relinks the smaller adjacency into the larger one; the
    external label of the result is whatever the caller asked for.
    """

    def __init__(self, vertices: Iterable[int] = (), forbidden: Iterable[int] = (), universe: Optional[int] = None):
        verts = list(vertices)
        self.universe = universe if universe is not None else (max(verts) + 1 if verts else 0)
        self._adj: Dict[int, Dict[int, object]] = {}
        self._int_of: Dict[int, int] = {}
        self._ext_of: Dict[int, int] = {}
        self._forbidden = set()
        self._deleted = BitVector(self.universe)
        self.relinks = 0
        self.merges = 0
        for x in verts:
            self.add_vertex(x)
        for x in forbidden:
            self._forbidden.add(self._int(x))

    # --- ラベル変換 ---

    def add_vertex(self, x: int, forbidden: bool = False) -> None:
        if x < 0 or x >= self.universe:
            raise UnknownVertex(x, {"reason": "outside the label universe", "universe": self.universe})
        if x in self._int_of:
            return
        # 内部IDは初期ラベルと同じ値から始める
        self._int_of[x] = x
        self._ext_of[x] = x
        self._adj[x] = {}
        if forbidden:
            self._forbidden.add(x)

    def _int(self, x: int) -> int:
        try:
            ix = self._int_of[x]
        except KeyError:
            if 0 <= x < self.universe and self._deleted.get(x):
                raise DeletedVertex(x) from None
            raise UnknownVertex(x) from None
        return ix

    def internal(self, x: int) -> int:
        return self._int(x)

    def external(self, ix: int) -> int:
        return self._ext_of[ix]

    def __contains__(self, x: int) -> bool:
        return x in self._int_of

    def vertices(self) -> List[int]:
        return sorted(self._int_of)

    def is_deleted(self, x: int) -> bool:
        return 0 <= x < self.universe and self._deleted.get(x)

    def is_forbidden(self, x: int) -> bool:
        return self._int(x) in self._forbidden

    def forbidden_set(self) -> set:
        return {self._ext_of[ix] for ix in self._forbidden}

    # --- 参照 ---

    def adjacent(self, u: int, v: int) -> bool:
        return self._int(v) in self._adj[self._int(u)]

    def neighbors(self, u: int) -> List[int]:
        return [self._ext_of[ix] for ix in self._adj[self._int(u)]]

    def items(self, u: int) -> List[Tuple[int, object]]:
        return [(self._ext_of[ix], p) for ix, p in self._adj[self._int(u)].items()]

    def degree(self, u: int) -> int:
        return len(self._adj[self._int(u)])

    def payload(self, u: int, v: int):
        iu, iv = self._int(u), self._int(v)
        try:
            return self._adj[iu][iv]
        except KeyError:
            raise NotAnEdge(u, v) from None

    def set_payload(self, u: int, v: int, payload) -> None:
        iu, iv = self._int(u), self._int(v)
        if iv not in self._adj[iu]:
            raise NotAnEdge(u, v)
        self._adj[iu][iv] = payload
        self._adj[iv][iu] = payload

    def edge_count(self) -> int:
        return sum(len(nb) for nb in self._adj.values()) // 2

    def edges(self) -> List[Tuple[int, int, object]]:
        out = []
        for iu, nb in self._adj.items():
            for iv, p in nb.items():
                u, v = self._ext_of[iu], self._ext_of[iv]
                if u < v:
                    out.append((u, v, p))
        out.sort(key=lambda e: (e[0], e[1]))
        return out

    # --- 変更 ---

    def insert(self, u: int, v: int, payload=None) -> bool:
        if u == v:
            raise SameVertex(u)
        iu, iv = self._int(u), self._int(v)
        if iv in self._adj[iu]:
            raise EdgeExists(u, v)
        if iu in self._forbidden and iv in self._forbidden:
            return False
        self._adj[iu][iv] = payload
        self._adj[iv][iu] = payload
        return True

    def delete(self, u: int, v: int):
        iu, iv = self._int(u), self._int(v)
        if iv not in self._adj[iu]:
            raise NotAnEdge(u, v)
        del self._adj[iv][iu]
        return self._adj[iu].pop(iv)

    def delete_vertex(self, u: int) -> List[Tuple[int, object]]:
        """Remove every incident edge and flag u deleted; returns the removed (x, payload)."""
        iu = self._int(u)
        removed = []
        for ix, p in self._adj.pop(iu).items():
            del self._adj[ix][iu]
            removed.append((self._ext_of[ix], p))
        del self._int_of[u]
        del self._ext_of[iu]
        self._forbidden.discard(iu)
        self._deleted.set(u)
        return removed

    def merge(self, u: int, v: int, survivor: int) -> MergeReport:
        if u == v:
            raise SameVertex(u)
        if survivor not in (u, v):
            raise UnknownVertex(survivor, {"reason": "survivor must be one of the merged vertices"})
        dropped = v if survivor == u else u
        i_s, i_d = self._int(survivor), self._int(dropped)
        s_adj, d_adj = self._adj[i_s], self._adj[i_d]
        now_forbidden = i_s in self._forbidden or i_d in self._forbidden
        report = MergeReport(survivor=survivor, dropped=dropped, contracted=i_s in d_adj)

        for ix, p in d_adj.items():
            if ix == i_s:
                continue
            if ix in s_adj:
                report.discarded_parallel.append((self._ext_of[ix], s_adj[ix], p))
            elif now_forbidden and ix in self._forbidden:
                report.discarded_forbidden.append((self._ext_of[ix], p))
            else:
                report.inserted_new.append((self._ext_of[ix], p))
        if now_forbidden and i_s not in self._forbidden:
            for ix, p in s_adj.items():
                if ix != i_d and ix in self._forbidden:
                    report.revoked.append((self._ext_of[ix], p))

        # 小さい方を大きい方へ付け替える
        keep, drop = (i_s, i_d) if len(s_adj) >= len(d_adj) else (i_d, i_s)
        keep_adj = self._adj[keep]
        keep_adj.pop(drop, None)
        for ix, p in self._adj.pop(drop).items():
            if ix == keep:
                continue
            del self._adj[ix][drop]
            self.relinks += 1
            if ix in keep_adj:
                continue
            keep_adj[ix] = p
            self._adj[ix][keep] = p
        if keep != i_s:
            for x, kept, _ in report.discarded_parallel:
                ix = self._int_of[x]
                keep_adj[ix] = kept
                self._adj[ix][keep] = kept
        if now_forbidden:
            for ix in [ix for ix in keep_adj if ix in self._forbidden]:
                del keep_adj[ix]
                del self._adj[ix][keep]
            self._forbidden.discard(drop)
            self._forbidden.add(keep)

        del self._ext_of[drop]
        del self._int_of[dropped]
        self._ext_of[keep] = survivor
        self._int_of[survivor] = keep
        self.merges += 1
        return report

    def check(self) -> List[str]:
        """Structural self-check; returns violation messages."""
        problems = []
        for iu, nb in self._adj.items():
            if iu in nb:
                problems.append(f"self-loop at {self._ext_of[iu]}")
            for iv, p in nb.items():
                if self._adj.get(iv, {}).get(iu, object()) is not p:
                    problems.append(f"asymmetric edge {{{self._ext_of[iu]}, {self._ext_of.get(iv)}}}")
                if iu in self._forbidden and iv in self._forbidden:
                    problems.append(f"forbidden edge {{{self._ext_of[iu]}, {self._ext_of[iv]}}}")
        for x, ix in self._int_of.items():
            if self._ext_of.get(ix) != x:
                problems.append(f"label maps disagree on {x}")
        return problems


# ========= entry points =========

def fg_merge(g: ForbiddenGraph, u: int, v: int, survivor_label: int) -> MergeReport:
    return g.merge(u, v, survivor_label)


def fg_insert(g: ForbiddenGraph, u: int, v: int, payload=None) -> bool:
    return g.insert(u, v, payload)


def fg_delete(g: ForbiddenGraph, u: int, v: int):
    return g.delete(u, v)


def fg_adjacent(g: ForbiddenGraph, u: int, v: int) -> bool:
    return g.adjacent(u, v)


def fg_neighbors(g: ForbiddenGraph, u: int) -> List[int]:
    return g.neighbors(u)


def fg_degree(g: ForbiddenGraph, u: int) -> int:
    return g.degree(u)


def fg_delete_vertex(g: ForbiddenGraph, u: int) -> None:
    g.delete_vertex(u)
