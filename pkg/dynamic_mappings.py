"""Dynamic label translation: internal/external mini labels, Φ⁻¹ maps and the H-family."""
import logging
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from errors import DeletedVertex, NotBoundary, NotManaged
from forbidden_graph import ForbiddenGraph
from succinct import CompactArray, IndexableDictionary


logger = logging.getLogger("planarsucc.dynamic_mappings")

Tuple2 = Tuple[int, int]


# ========= IntExtMap =========

class IntExtMap:
    """internal_i / external_i over the managed labels; identity everywhere else."""

    def __init__(self, universe: int, managed: Sequence[int]):
        managed = list(managed)
        self.index = IndexableDictionary(universe, managed)
        top = max(universe - 1, 0)
        self._internal = CompactArray.from_values(managed, max_value=top)
        self._external = CompactArray.from_values(managed, max_value=top)

    def managed(self, x: int) -> bool:
        return x in self.index

    def internal(self, y: int) -> int:
        if y in self.index:
            return self._internal[self.index.rank(y)]
        return y

    def external(self, x: int) -> int:
        if x in self.index:
            return self._external[self.index.rank(x)]
        return x

    def link(self, external: int, internal: int) -> None:
        """Make `external` and `internal` name each other."""
        self._internal[self.index.rank(external)] = internal
        self._external[self.index.rank(internal)] = external

    def size_in_bits(self) -> int:
        return self.index.size_in_bits() + self._internal.size_in_bits() + self._external.size_in_bits()


def intext_get(m: IntExtMap, label: int, direction: str = "internal") -> int:
    return m.internal(label) if direction == "internal" else m.external(label)


def intext_set(m: IntExtMap, external: int, internal: int) -> None:
    m.link(external, internal)


# ========= DynInverse =========

class DynInverse:
    """Φ⁻¹ over a managed subset: an ID for membership plus a compact array of values."""

    def __init__(self, universe: int, managed: Sequence[int], values: Sequence[int], max_value: int):
        self.index = IndexableDictionary(universe, list(managed))
        self._values = CompactArray.from_values(list(values), max_value=max(max_value, 0))

    def managed(self, x: int) -> bool:
        return x in self.index

    def get(self, x: int) -> int:
        if x not in self.index:
            raise NotManaged(f"label {x} has no dynamic inverse", {"label": x})
        return self._values[self.index.rank(x)]

    def set(self, x: int, value: int) -> None:
        if x not in self.index:
            raise NotManaged(f"label {x} has no dynamic inverse", {"label": x})
        self._values[self.index.rank(x)] = value

    def size_in_bits(self) -> int:
        return self.index.size_in_bits() + self._values.size_in_bits()


def dyninv_get(d: DynInverse, x: int) -> int:
    return d.get(x)


def dyninv_set(d: DynInverse, x: int, value: int) -> None:
    d.set(x, value)


# ========= HLevel =========

class HLevel:
    """H, H^{>0} (and optionally H′) for one level of the hierarchy.

    Boundary vertices keep their labels; piece p is the vertex `node_offset + p` and sits in
    the forbidden set. The payload of an edge (u, node(p)) is the tuple (p, duplicate).
    """

    def __init__(self, boundary: Iterable[int], piece_count: int, node_offset: int,
                 with_prime: bool = False, hashing: bool = False):
        boundary = list(boundary)
        self.node_offset = node_offset
        self.piece_count = piece_count
        nodes = [node_offset + p for p in range(piece_count)]
        universe = node_offset + piece_count
        self.h = ForbiddenGraph(boundary + nodes, forbidden=nodes, universe=universe)
        self.nonzero = ForbiddenGraph(boundary + nodes, forbidden=nodes, universe=universe)
        self.prime = ForbiddenGraph(boundary + nodes, forbidden=nodes, universe=universe) if with_prime else None
        self.hash: Optional[Dict[Tuple2, int]] = {} if hashing else None

    def node(self, piece: int) -> int:
        return self.node_offset + piece

    def add_tuple(self, u: int, piece: int, dup: int, positive: bool, prime: bool = False) -> None:
        self.h.insert(u, self.node(piece), (piece, dup))
        if positive:
            self.nonzero.insert(u, self.node(piece), (piece, dup))
        if prime and self.prime is not None:
            self.prime.insert(u, self.node(piece), (piece, dup))
        if self.hash is not None:
            self.hash[(u, piece)] = dup

    def _require(self, u: int) -> None:
        if 0 <= u < self.node_offset and u in self.h:
            return
        if 0 <= u < self.node_offset and self.h.is_deleted(u):
            raise DeletedVertex(u)
        raise NotBoundary(f"{u} is not a boundary vertex of this level", {"vertex": u})

    def phi(self, u: int) -> List[Tuple2]:
        self._require(u)
        return [p for _, p in self.h.items(u)]

    def phi_nonzero(self, u: int) -> List[Tuple2]:
        self._require(u)
        return [p for _, p in self.nonzero.items(u)]

    def phi_prime(self, u: int) -> List[Tuple2]:
        self._require(u)
        return [p for _, p in self.prime.items(u)] if self.prime is not None else []

    def size(self, u: int) -> int:
        return self.h.degree(u)

    def lookup(self, u: int, piece: int) -> Optional[int]:
        """Duplicate of u in piece, or None."""
        if self.hash is not None:
            return self.hash.get((u, piece))
        node = self.node(piece)
        if not self.h.adjacent(u, node):
            return None
        return self.h.payload(u, node)[1]

    def merge(self, u: int, v: int, survivor: int):
        """Merge the Φ-sets of u and v; returns (z_cap, z_only_dropped)."""
        dropped = v if survivor == u else u
        report = self.h.merge(u, v, survivor)
        self.nonzero.merge(u, v, survivor)
        if self.prime is not None:
            self.prime.merge(u, v, survivor)
        z_cap = [(kept[0], kept[1], lost[1]) for _, kept, lost in report.discarded_parallel]
        z_only = [payload for _, payload in report.inserted_new]
        if self.hash is not None:
            for piece, _, _ in z_cap:
                self.hash.pop((dropped, piece), None)
            for piece, dup in z_only:
                self.hash.pop((dropped, piece), None)
                self.hash[(survivor, piece)] = dup
        return z_cap, z_only

    def _update(self, g: ForbiddenGraph, u: int, piece: int, dup: int, present: bool) -> bool:
        node = self.node(piece)
        has = g.adjacent(u, node)
        if present and not has:
            g.insert(u, node, (piece, dup))
            return True
        if not present and has:
            g.delete(u, node)
            return True
        if present and g.payload(u, node) != (piece, dup):
            g.set_payload(u, node, (piece, dup))
            return True
        return False

    def set_nonzero(self, u: int, piece: int, dup: int, positive: bool) -> bool:
        return self._update(self.nonzero, u, piece, dup, positive)

    def set_prime(self, u: int, piece: int, dup: int, present: bool) -> bool:
        if self.prime is None:
            return False
        return self._update(self.prime, u, piece, dup, present)

    def delete_vertex(self, u: int) -> List[Tuple2]:
        removed = [p for _, p in self.h.delete_vertex(u)]
        self.nonzero.delete_vertex(u)
        if self.prime is not None:
            self.prime.delete_vertex(u)
        if self.hash is not None:
            for piece, _ in removed:
                self.hash.pop((u, piece), None)
        return removed

    def graphs(self) -> List[ForbiddenGraph]:
        return [g for g in (self.h, self.nonzero, self.prime) if g is not None]

    def relinks(self) -> int:
        return sum(g.relinks for g in self.graphs())


# ========= entry points =========

def phi_iter(level: HLevel, u: int) -> List[Tuple2]:
    return level.phi(u)


def phi_nonzero_iter(level: HLevel, u: int) -> List[Tuple2]:
    return level.phi_nonzero(u)


def phi_i_iter(level: HLevel, u_star: int) -> List[Tuple2]:
    """(micro graph, micro label) pairs of an internal mini boundary label."""
    return level.phi(u_star)


def phi_merge(level: HLevel, u: int, v: int, survivor: Optional[int] = None):
    return level.merge(u, v, u if survivor is None else survivor)


def nonzero_update(level: HLevel, u: int, piece: int, duplicate: int, now_positive: bool) -> None:
    level.set_nonzero(u, piece, duplicate, now_positive)
