"""Lookup table over all planar graphs on vertex set [k].

The highest label k-1 of a stratum is the dummy vertex: a vertex is deleted exactly
when it is adjacent to the dummy, and a deleted vertex has no other neighbours. A micro
graph is addressed by a code (k, index) where index is the rank of its edge bitmask among
the planar bitmasks of stratum k.

Edge {a, b} with a < b occupies bit b*(b-1)/2 + a, so the bit layout of [k] is a prefix
of the layout of [k+1].
"""
import functools
import logging
import pathlib
from itertools import combinations
from typing import Dict, Iterable, Iterator, List, Optional, Tuple

import numpy as np

from errors import CapExceeded, DeletedVertex, NonplanarResult, TooLarge, UnknownVertex


logger = logging.getLogger("planarsucc.microtable")

MAX_R_PRIME = 6
MAX_TINY_VERTICES = 8
# これ以下の層は合併遷移を事前計算、超えたら遅延計算
EAGER_TRANSITION_MAX_K = 6
CACHE_MAGIC = "MTBL1"

MicroCode = Tuple[int, int]


def pair_bit(a: int, b: int) -> int:
    if a > b:
        a, b = b, a
    return b * (b - 1) // 2 + a


def pair_count(k: int) -> int:
    return k * (k - 1) // 2


def edges_to_mask(edges: Iterable[Tuple[int, int]]) -> int:
    m = 0
    for a, b in edges:
        m |= 1 << pair_bit(a, b)
    return m


def mask_to_edges(k: int, mask: int) -> List[Tuple[int, int]]:
    return [(a, b) for b in range(k) for a in range(b) if (mask >> pair_bit(a, b)) & 1]


# ========= Kuratowski subdivisions =========

def _insert_subdividers(paths: List[List[int]], extras: Tuple[int, ...]) -> Iterator[List[List[int]]]:
    if not extras:
        yield paths
        return
    x = extras[0]
    for pi, path in enumerate(paths):
        for pos in range(1, len(path)):
            grown = paths[:pi] + [path[:pos] + [x] + path[pos:]] + paths[pi + 1:]
            yield from _insert_subdividers(grown, extras[1:])


def _paths_mask(paths: List[List[int]]) -> int:
    m = 0
    for path in paths:
        for a, b in zip(path, path[1:]):
            m |= 1 << pair_bit(a, b)
    return m


def _subdivisions_of(branch_edges: List[Tuple[int, int]], spare: Tuple[int, ...], out: set) -> None:
    base = [[a, b] for a, b in branch_edges]
    for size in range(len(spare) + 1):
        for used in combinations(spare, size):
            for paths in _insert_subdividers(base, used):
                out.add(_paths_mask(paths))


@functools.lru_cache(maxsize=None)
def kuratowski_masks(k: int) -> np.ndarray:
    """Edge masks of every K5 / K3,3 subdivision whose vertices lie in [k]."""
    if k > MAX_TINY_VERTICES:
        raise TooLarge(f"subdivision enumeration limited to {MAX_TINY_VERTICES} vertices", {"k": k})
    found = set()
    verts = tuple(range(k))
    for branch in combinations(verts, 5):
        spare = tuple(x for x in verts if x not in branch)
        _subdivisions_of(list(combinations(branch, 2)), spare, found)
    for six in combinations(verts, 6):
        spare = tuple(x for x in verts if x not in six)
        for side in combinations(six[1:], 2):
            left = (six[0],) + side
            right = tuple(x for x in six if x not in left)
            _subdivisions_of([(a, b) for a in left for b in right], spare, found)
    arr = np.array(sorted(found), dtype=np.uint32)
    logger.debug("【診断】kuratowski_masks k=%d count=%d", k, arr.size)
    return arr


def _superset_offsets(free_bits: List[int]) -> np.ndarray:
    idx = np.arange(1 << len(free_bits), dtype=np.uint32)
    sub = np.zeros(idx.shape[0], dtype=np.uint32)
    for t, pos in enumerate(free_bits):
        sub |= ((idx >> np.uint32(t)) & np.uint32(1)) << np.uint32(pos)
    return sub


def _planar_masks(k: int) -> np.ndarray:
    """Sorted planar edge masks on [k]: complement of the up-closure of the subdivisions."""
    bits = pair_count(k)
    planar = np.ones(1 << bits, dtype=bool)
    for km in kuratowski_masks(k) if k >= 5 else ():
        km = int(km)
        free = [p for p in range(bits) if not (km >> p) & 1]
        planar[np.uint32(km) | _superset_offsets(free)] = False
    return np.flatnonzero(planar).astype(np.uint32)


def tiny_planarity(g) -> bool:
    """Planarity of a graph with at most 8 vertices (a LabeledGraph or an edge list)."""
    if hasattr(g, "vertices"):
        verts, edges = g.vertices(), g.edges()
    else:
        edges = list(g)
        verts = sorted({x for e in edges for x in e})
    if len(verts) > MAX_TINY_VERTICES:
        raise TooLarge(f"{len(verts)} vertices exceed the tiny planarity limit", {"n": len(verts)})
    if len(verts) < 5:
        return True
    pos = {x: i for i, x in enumerate(verts)}
    mask = np.uint32(edges_to_mask((pos[a], pos[b]) for a, b in edges))
    km = kuratowski_masks(len(verts))
    return not bool(np.any((km & mask) == km))


# ========= MicroTable =========

class _Stratum:
    def __init__(self, k: int, masks: np.ndarray, transitions: Optional[np.ndarray] = None):
        self.k = k
        self.dummy = k - 1
        self.masks = masks
        self.transitions = transitions
        self.lazy: Dict[Tuple[int, int, int], int] = {}
        # 各頂点の (隣接候補, ビット位置)
        self.pairs = [[(w, pair_bit(u, w)) for w in range(k) if w != u] for u in range(k)]

    @property
    def count(self) -> int:
        return int(self.masks.shape[0])

    def index_of(self, mask: int) -> int:
        i = int(np.searchsorted(self.masks, np.uint32(mask)))
        if i >= self.count or int(self.masks[i]) != mask:
            return -1
        return i


def _merge_masks(masks: np.ndarray, k: int, u: int, v: int) -> np.ndarray:
    """Vectorised label-preserving merge of v into u over a whole stratum."""
    out = masks.copy()
    dummy = k - 1
    for w in range(k - 1):
        if w in (u, v):
            continue
        has = (masks >> np.uint32(pair_bit(v, w))) & np.uint32(1)
        out |= has << np.uint32(pair_bit(u, w))
    for w in range(k):
        if w != v:
            out &= ~np.uint32(1 << pair_bit(v, w))
    out |= np.uint32(1 << pair_bit(v, dummy))
    return out


def _deleted_flags(masks: np.ndarray, k: int, x: int) -> np.ndarray:
    return ((masks >> np.uint32(pair_bit(x, k - 1))) & np.uint32(1)).astype(bool)


class MicroTable:
    """Strata k = 1..r_prime+1 of planar graphs plus their merge transitions."""

    def __init__(self, r_prime: int, strata: Dict[int, _Stratum]):
        self.r_prime = r_prime
        self.strata = strata
        self.lazy_hits = 0

    # --- codes ---

    def stratum(self, k: int) -> _Stratum:
        try:
            return self.strata[k]
        except KeyError:
            raise CapExceeded(f"no stratum for {k} vertices (r_prime={self.r_prime})", {"k": k}) from None

    def count(self, k: int) -> int:
        return self.stratum(k).count

    def index_width(self, k: int) -> int:
        return max(1, (self.count(k) - 1).bit_length())

    def mask_of(self, code: MicroCode) -> int:
        k, idx = code
        st = self.stratum(k)
        if idx < 0 or idx >= st.count:
            raise UnknownVertex(idx, {"reason": "table index out of range", "k": k})
        return int(st.masks[idx])

    def code_of(self, k: int, mask: int) -> MicroCode:
        idx = self.stratum(k).index_of(mask)
        if idx < 0:
            raise NonplanarResult("edge mask is not a planar graph of the table", {"k": k, "mask": mask})
        return (k, idx)

    def encode(self, live: int, edges: Iterable[Tuple[int, int]], deleted: Iterable[int] = ()) -> MicroCode:
        """Code for a graph on live labels 0..live-1; the dummy gets label `live`."""
        k = live + 1
        mask = edges_to_mask(edges)
        for x in deleted:
            mask |= 1 << pair_bit(x, live)
        return self.code_of(k, mask)

    def decode(self, code: MicroCode) -> List[Tuple[int, int]]:
        return mask_to_edges(code[0], self.mask_of(code))

    # --- queries ---

    def _live(self, st: _Stratum, mask: int, u: int) -> None:
        if u < 0 or u >= st.dummy:
            raise UnknownVertex(u, {"k": st.k})
        if (mask >> pair_bit(u, st.dummy)) & 1:
            raise DeletedVertex(u, {"k": st.k})

    def is_deleted(self, code: MicroCode, u: int) -> bool:
        st = self.stratum(code[0])
        return bool((self.mask_of(code) >> pair_bit(u, st.dummy)) & 1)

    def adjacent(self, code: MicroCode, u: int, v: int) -> bool:
        st = self.stratum(code[0])
        mask = self.mask_of(code)
        self._live(st, mask, u)
        self._live(st, mask, v)
        return u != v and bool((mask >> pair_bit(u, v)) & 1)

    def range_neighbors(self, code: MicroCode, u: int, a: int, b: int) -> List[int]:
        st = self.stratum(code[0])
        mask = self.mask_of(code)
        self._live(st, mask, u)
        hi = min(b, st.dummy - 1)
        return [w for w, p in st.pairs[u] if a <= w <= hi and (mask >> p) & 1]

    def neighbors(self, code: MicroCode, u: int) -> List[int]:
        return self.range_neighbors(code, u, 0, code[0] - 2)

    def degree(self, code: MicroCode, u: int) -> int:
        return len(self.neighbors(code, u))

    # --- updates ---

    def batch_delete(self, code: MicroCode, u: int, a: int, b: int) -> MicroCode:
        st = self.stratum(code[0])
        mask = self.mask_of(code)
        if u < 0 or u >= st.dummy:
            raise UnknownVertex(u, {"k": st.k})
        hi = min(b, st.dummy - 1)
        for w, p in st.pairs[u]:
            if a <= w <= hi:
                mask &= ~(1 << p)
        return self.code_of(st.k, mask)

    def delete_vertex(self, code: MicroCode, u: int) -> MicroCode:
        st = self.stratum(code[0])
        mask = self.mask_of(code)
        self._live(st, mask, u)
        for _, p in st.pairs[u]:
            mask &= ~(1 << p)
        mask |= 1 << pair_bit(u, st.dummy)
        return self.code_of(st.k, mask)

    def merge(self, code: MicroCode, u: int, v: int) -> MicroCode:
        k, idx = code
        st = self.stratum(k)
        mask = self.mask_of(code)
        self._live(st, mask, u)
        self._live(st, mask, v)
        if u == v:
            raise UnknownVertex(v, {"reason": "merge of a vertex with itself"})
        if st.transitions is not None:
            new_idx = int(st.transitions[idx, u, v])
        else:
            key = (idx, u, v)
            new_idx = st.lazy.get(key)
            if new_idx is None:
                merged = int(_merge_masks(np.array([mask], dtype=np.uint32), k, u, v)[0])
                new_idx = st.index_of(merged)
                st.lazy[key] = new_idx
            else:
                self.lazy_hits += 1
        if new_idx < 0:
            raise NonplanarResult(f"merging {v} into {u} is not planar", {"k": k, "index": idx})
        return (k, new_idx)


# ========= build / cache =========

def _precompute_transitions(masks: np.ndarray, k: int) -> np.ndarray:
    trans = np.full((masks.shape[0], k, k), -1, dtype=np.int32)
    for u in range(k - 1):
        du = _deleted_flags(masks, k, u)
        for v in range(k - 1):
            if u == v:
                continue
            merged = _merge_masks(masks, k, u, v)
            pos = np.searchsorted(masks, merged)
            pos_clip = np.minimum(pos, masks.shape[0] - 1)
            ok = (pos < masks.shape[0]) & (masks[pos_clip] == merged)
            ok &= ~du & ~_deleted_flags(masks, k, v)
            trans[:, u, v] = np.where(ok, pos_clip, -1)
    return trans


def build_table(r_prime: int) -> MicroTable:
    if r_prime > MAX_R_PRIME:
        raise CapExceeded(f"r_prime={r_prime} exceeds the table cap {MAX_R_PRIME}", {"r_prime": r_prime})
    if r_prime < 1:
        raise CapExceeded(f"r_prime={r_prime} is below 1", {"r_prime": r_prime})
    strata = {}
    for k in range(1, r_prime + 2):
        masks = _planar_masks(k)
        trans = _precompute_transitions(masks, k) if k <= EAGER_TRANSITION_MAX_K else None
        strata[k] = _Stratum(k, masks, trans)
        logger.info("micro stratum k=%d: %d planar graphs (%s transitions)", k, masks.shape[0],
                    "eager" if trans is not None else "lazy")
    return MicroTable(r_prime, strata)


def save_table(t: MicroTable, path) -> None:
    with pathlib.Path(path).open("wb") as fh:
        fh.write(f"{CACHE_MAGIC} {t.r_prime}\n".encode("ascii"))
        for k in range(1, t.r_prime + 2):
            st = t.strata[k]
            np.lib.format.write_array(fh, st.masks, allow_pickle=False)
            trans = st.transitions if st.transitions is not None else np.zeros(0, dtype=np.int32)
            np.lib.format.write_array(fh, trans, allow_pickle=False)


def load_table(path) -> MicroTable:
    with pathlib.Path(path).open("rb") as fh:
        header = fh.readline().decode("ascii", errors="replace").split()
        if len(header) != 2 or header[0] != CACHE_MAGIC:
            raise CapExceeded(f"{path}: not a {CACHE_MAGIC} table cache", {"header": header})
        r_prime = int(header[1])
        if r_prime > MAX_R_PRIME:
            raise CapExceeded(f"cached r_prime={r_prime} exceeds the cap", {"r_prime": r_prime})
        strata = {}
        for k in range(1, r_prime + 2):
            masks = np.lib.format.read_array(fh, allow_pickle=False)
            trans = np.lib.format.read_array(fh, allow_pickle=False)
            strata[k] = _Stratum(k, masks, trans if trans.ndim == 3 else None)
    return MicroTable(r_prime, strata)


# ========= entry points =========

def tbl_adjacent(t: MicroTable, code: MicroCode, u: int, v: int) -> bool:
    return t.adjacent(code, u, v)


def tbl_degree(t: MicroTable, code: MicroCode, u: int) -> int:
    return t.degree(code, u)


def tbl_neighbors(t: MicroTable, code: MicroCode, u: int) -> List[int]:
    return t.neighbors(code, u)


def tbl_range_neighbors(t: MicroTable, code: MicroCode, u: int, a: int, b: int) -> List[int]:
    return t.range_neighbors(code, u, a, b)


def tbl_batch_delete(t: MicroTable, code: MicroCode, u: int, a: int, b: int) -> MicroCode:
    return t.batch_delete(code, u, a, b)


def tbl_merge(t: MicroTable, code: MicroCode, u: int, v: int) -> MicroCode:
    return t.merge(code, u, v)


def tbl_delete_vertex(t: MicroTable, code: MicroCode, u: int) -> MicroCode:
    return t.delete_vertex(code, u)
