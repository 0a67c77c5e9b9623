"""Bit vectors, fixed-width compact arrays and the indexable dictionary.

All three keep their payload in 64-bit words held as a plain list of ints; numpy is
used for the bulk work at build time (packing, popcounts, prefix sums).
"""
from bisect import bisect_left
from typing import Iterable, List, Optional, Sequence

import numpy as np

from errors import IndexOutOfRange, OutOfUniverse


WORD_BITS = 64
WORDS_PER_SUPERBLOCK = 8
_WORD_MASK = (1 << WORD_BITS) - 1


def bits_for(max_value: int) -> int:
    """Entry width able to hold every value in [0, max_value]."""
    if max_value < 0:
        raise OutOfUniverse(f"negative value {max_value}")
    return max(1, int(max_value).bit_length())


def _pack_bits(flags: np.ndarray) -> List[int]:
    n = int(flags.shape[0])
    n_words = (n + WORD_BITS - 1) // WORD_BITS
    if n_words == 0:
        return []
    padded = np.zeros(n_words * WORD_BITS, dtype=np.uint8)
    padded[:n] = flags.astype(np.uint8)
    packed = np.packbits(padded.reshape(n_words, WORD_BITS), axis=1, bitorder="little")
    words = packed.view("<u8").reshape(n_words)
    return [int(w) for w in words]


# ========= BitVector =========

class BitVector:
    def __init__(self, length: int, ones: Optional[Iterable[int]] = None):
        if length < 0:
            raise OutOfUniverse(f"negative length {length}")
        self.length = int(length)
        flags = np.zeros(self.length, dtype=bool)
        if ones is not None:
            idx = np.fromiter(ones, dtype=np.int64)
            if idx.size and (idx.min() < 0 or idx.max() >= self.length):
                raise OutOfUniverse("bit position outside the vector")
            flags[idx] = True
        self._words = _pack_bits(flags)
        self._count = int(flags.sum())

    def _check(self, i: int) -> None:
        if i < 0 or i >= self.length:
            raise IndexOutOfRange(f"bit {i} outside [0, {self.length})", {"index": i})

    def get(self, i: int) -> bool:
        self._check(i)
        return (self._words[i >> 6] >> (i & 63)) & 1 == 1

    def __getitem__(self, i: int) -> bool:
        return self.get(i)

    def set(self, i: int, bit: bool = True) -> None:
        self._check(i)
        w, off = i >> 6, i & 63
        old = (self._words[w] >> off) & 1
        if bit and not old:
            self._words[w] |= 1 << off
            self._count += 1
        elif not bit and old:
            self._words[w] &= ~(1 << off) & _WORD_MASK
            self._count -= 1

    def popcount(self) -> int:
        return self._count

    def ones(self) -> List[int]:
        out = []
        for w, word in enumerate(self._words):
            while word:
                low = word & -word
                out.append(w * WORD_BITS + low.bit_length() - 1)
                word ^= low
        return out

    def __len__(self) -> int:
        return self.length

    def size_in_bits(self) -> int:
        return len(self._words) * WORD_BITS


# ========= CompactArray =========

class CompactArray:
    """Fixed-width unsigned entries packed back to back.

    A growable array widens every entry when a stored value overflows, instead of raising.
    """

    def __init__(self, length: int, entry_width: int, values: Optional[Sequence[int]] = None,
                 growable: bool = False):
        if entry_width < 1 or entry_width > WORD_BITS:
            raise OutOfUniverse(f"entry width {entry_width} outside [1, {WORD_BITS}]")
        self.growable = growable
        self.length = int(length)
        self.entry_width = int(entry_width)
        self._mask = (1 << self.entry_width) - 1
        self._words = [0] * ((self.length * self.entry_width + WORD_BITS - 1) // WORD_BITS)
        if values is not None:
            if len(values) != self.length:
                raise OutOfUniverse("value count does not match the array length")
            for i, v in enumerate(values):
                self.set(i, int(v))

    @classmethod
    def from_values(cls, values: Sequence[int], max_value: Optional[int] = None) -> "CompactArray":
        top = max_value if max_value is not None else (max(values) if len(values) else 0)
        return cls(len(values), bits_for(top), values)

    def _check(self, i: int) -> None:
        if i < 0 or i >= self.length:
            raise IndexOutOfRange(f"entry {i} outside [0, {self.length})", {"index": i})

    def get(self, i: int) -> int:
        self._check(i)
        bit = i * self.entry_width
        w, off = bit >> 6, bit & 63
        value = self._words[w] >> off
        if off + self.entry_width > WORD_BITS:
            value |= self._words[w + 1] << (WORD_BITS - off)
        return value & self._mask

    def widen(self, entry_width: int) -> None:
        if entry_width <= self.entry_width:
            return
        values = self.to_list()
        self.entry_width = int(entry_width)
        self._mask = (1 << self.entry_width) - 1
        self._words = [0] * ((self.length * self.entry_width + WORD_BITS - 1) // WORD_BITS)
        for i, v in enumerate(values):
            self.set(i, v)

    def set(self, i: int, value: int) -> None:
        self._check(i)
        if self.growable and value > self._mask:
            self.widen(bits_for(value))
        if value < 0 or value > self._mask:
            raise OutOfUniverse(
                f"value {value} does not fit in {self.entry_width} bits",
                {"index": i, "value": value},
            )
        bit = i * self.entry_width
        w, off = bit >> 6, bit & 63
        self._words[w] = (self._words[w] & ~(self._mask << off) & _WORD_MASK) | ((value << off) & _WORD_MASK)
        spill = off + self.entry_width - WORD_BITS
        if spill > 0:
            high_mask = (1 << spill) - 1
            self._words[w + 1] = (self._words[w + 1] & ~high_mask) | (value >> (self.entry_width - spill))

    def __getitem__(self, i: int) -> int:
        return self.get(i)

    def __setitem__(self, i: int, value: int) -> None:
        self.set(i, value)

    def __len__(self) -> int:
        return self.length

    def to_list(self) -> List[int]:
        return [self.get(i) for i in range(self.length)]

    def size_in_bits(self) -> int:
        return self.length * self.entry_width


# ========= IndexableDictionary =========

def _dense_bits(universe: int) -> int:
    n_words = (universe + WORD_BITS - 1) // WORD_BITS
    n_super = (n_words + WORDS_PER_SUPERBLOCK - 1) // WORDS_PER_SUPERBLOCK
    return n_words * WORD_BITS + n_super * WORD_BITS + n_words * 9


def _sparse_bits(universe: int, size: int) -> int:
    return size * bits_for(max(universe - 1, 0)) + WORD_BITS


class IndexableDictionary:
    """Static subset S of [universe] with rank, select and membership.

    Two layouts, whichever is smaller. Dense: a bitmap with a two-level rank directory
    (superblock prefix counts plus per-word offsets); select binary-searches the word
    prefix counts and finishes inside one word. Sparse: the sorted members in a compact
    array; select is a direct read, rank and member binary-search it.
    """

    def __init__(self, universe: int, members: Sequence[int]):
        if universe < 0:
            raise OutOfUniverse(f"negative universe {universe}")
        arr = np.asarray(list(members), dtype=np.int64)
        if arr.size:
            if arr.min() < 0 or arr.max() >= universe:
                raise OutOfUniverse(
                    "member outside the universe",
                    {"universe": universe, "min": int(arr.min()), "max": int(arr.max())},
                )
            if arr.size > 1 and np.any(np.diff(arr) <= 0):
                raise OutOfUniverse("members must be strictly increasing", {"universe": universe})
        self.universe = int(universe)
        self._size = int(arr.size)
        self.sparse = self._size > 0 and _sparse_bits(self.universe, self._size) < _dense_bits(self.universe)
        if self.sparse:
            self._sorted = CompactArray.from_values([int(x) for x in arr], max_value=max(self.universe - 1, 0))
            return

        flags = np.zeros(self.universe, dtype=bool)
        flags[arr] = True
        self._words = _pack_bits(flags)

        counts = np.bitwise_count(np.asarray(self._words, dtype=np.uint64)).astype(np.int64)
        before_word = np.concatenate(([0], np.cumsum(counts)[:-1])) if counts.size else np.zeros(0, np.int64)
        n_super = (len(self._words) + WORDS_PER_SUPERBLOCK - 1) // WORDS_PER_SUPERBLOCK
        superblock = before_word[::WORDS_PER_SUPERBLOCK] if n_super else np.zeros(0, np.int64)
        offsets = before_word - np.repeat(superblock, WORDS_PER_SUPERBLOCK)[: len(self._words)]
        self._super = [int(x) for x in superblock]
        self._block = [int(x) for x in offsets]
        # 単語ごとの累積（select の二分探索用）
        self._word_rank = [int(x) for x in before_word]

    def __len__(self) -> int:
        return self._size

    def rank(self, x: int) -> int:
        """Number of members strictly smaller than x, for 0 <= x <= universe."""
        if x < 0 or x > self.universe:
            raise OutOfUniverse(f"{x} outside [0, {self.universe}]", {"x": x})
        if x == self.universe:
            return self._size
        if self.sparse:
            return bisect_left(self._sorted, x)
        w = x >> 6
        below = self._words[w] & ((1 << (x & 63)) - 1)
        return self._super[w >> 3] + self._block[w] + below.bit_count()

    def _has(self, x: int) -> bool:
        if self.sparse:
            i = bisect_left(self._sorted, x)
            return i < self._size and self._sorted[i] == x
        return (self._words[x >> 6] >> (x & 63)) & 1 == 1

    def member(self, x: int) -> bool:
        if x < 0 or x >= self.universe:
            raise OutOfUniverse(f"{x} outside [0, {self.universe})", {"x": x})
        return self._has(x)

    def __contains__(self, x: int) -> bool:
        return 0 <= x < self.universe and self._has(x)

    def select(self, i: int) -> int:
        """The i-th smallest member (0-based)."""
        if i < 0 or i >= self._size:
            raise IndexOutOfRange(f"select({i}) on a set of size {self._size}", {"i": i})
        if self.sparse:
            return self._sorted[i]
        lo, hi = 0, len(self._word_rank) - 1
        while lo < hi:
            mid = (lo + hi + 1) >> 1
            if self._word_rank[mid] <= i:
                lo = mid
            else:
                hi = mid - 1
        word = self._words[lo]
        for _ in range(i - self._word_rank[lo]):
            word &= word - 1
        return lo * WORD_BITS + (word & -word).bit_length() - 1

    def members(self) -> List[int]:
        if self.sparse:
            return self._sorted.to_list()
        return [self.select(i) for i in range(self._size)]

    def size_in_bits(self) -> int:
        if self.sparse:
            # 要素配列 + 件数ヘッダ
            return self._sorted.size_in_bits() + WORD_BITS
        # ビットマップ + 上位ディレクトリ(64bit) + 下位オフセット(9bit)
        return len(self._words) * WORD_BITS + len(self._super) * WORD_BITS + len(self._block) * 9


# ========= entry points =========

def id_build(universe: int, members: Sequence[int]) -> IndexableDictionary:
    return IndexableDictionary(universe, members)


def id_rank(d: IndexableDictionary, x: int) -> int:
    return d.rank(x)


def id_select(d: IndexableDictionary, i: int) -> int:
    return d.select(i)


def id_member(d: IndexableDictionary, x: int) -> bool:
    return d.member(x)
