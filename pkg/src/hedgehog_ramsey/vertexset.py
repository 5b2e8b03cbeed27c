"""Bit-packed vertex subsets of ``range(n)``."""

from __future__ import annotations

from typing import Iterable, Iterator

import numpy as np


class VertexSet:
    """An immutable subset of ``range(n)`` stored as packed 64-bit words."""

    __slots__ = ("n", "_words")

    def __init__(self, n: int, words: np.ndarray | None = None):
        self.n = int(n)
        nwords = (self.n + 63) >> 6
        if words is None:
            words = np.zeros(nwords, dtype=np.uint64)
        elif words.shape != (nwords,):
            raise ValueError("word array does not match n")
        self._words = words
        self._words.flags.writeable = False

    @classmethod
    def from_mask(cls, mask: np.ndarray) -> VertexSet:
        mask = np.asarray(mask, dtype=bool)
        n = mask.shape[0]
        padded = np.zeros(((n + 63) >> 6) << 6, dtype=bool)
        padded[:n] = mask
        packed = np.packbits(padded, bitorder="little")
        return cls(n, packed.view(np.uint64).copy())

    @classmethod
    def from_iterable(cls, n: int, members: Iterable[int]) -> VertexSet:
        mask = np.zeros(n, dtype=bool)
        idx = np.fromiter((int(x) for x in members), dtype=np.int64)
        if idx.size and (idx.min() < 0 or idx.max() >= n):
            raise ValueError("vertex out of range")
        mask[idx] = True
        return cls.from_mask(mask)

    @classmethod
    def full(cls, n: int) -> VertexSet:
        return cls.from_mask(np.ones(n, dtype=bool))

    def to_mask(self) -> np.ndarray:
        bits = np.unpackbits(self._words.view(np.uint8), bitorder="little")
        return bits[: self.n].astype(bool)

    def to_array(self) -> np.ndarray:
        """Members in ascending order."""
        return np.flatnonzero(self.to_mask())

    def __len__(self) -> int:
        return int(np.bitwise_count(self._words).sum())

    def __contains__(self, v: object) -> bool:
        if not isinstance(v, (int, np.integer)) or not 0 <= v < self.n:
            return False
        v = int(v)
        return bool((int(self._words[v >> 6]) >> (v & 63)) & 1)

    def __iter__(self) -> Iterator[int]:
        return iter(self.to_array().tolist())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, VertexSet):
            return NotImplemented
        return self.n == other.n and bool(np.array_equal(self._words, other._words))

    def __hash__(self) -> int:
        return hash((self.n, self._words.tobytes()))

    def __repr__(self) -> str:
        members = self.to_array()
        shown = ", ".join(str(x) for x in members[:12])
        if members.size > 12:
            shown += ", ..."
        return f"VertexSet(n={self.n}, {{{shown}}})"

    def _check(self, other: VertexSet) -> None:
        if self.n != other.n:
            raise ValueError("vertex sets over different ground sets")

    def _tail_mask(self) -> np.ndarray:
        words = np.full_like(self._words, np.uint64(0xFFFFFFFFFFFFFFFF))
        rem = self.n & 63
        if rem:
            words[-1] = np.uint64((1 << rem) - 1)
        return words

    def complement(self) -> VertexSet:
        return VertexSet(self.n, ~self._words & self._tail_mask())

    def __or__(self, other: VertexSet) -> VertexSet:
        self._check(other)
        return VertexSet(self.n, self._words | other._words)

    def __and__(self, other: VertexSet) -> VertexSet:
        self._check(other)
        return VertexSet(self.n, self._words & other._words)

    def __sub__(self, other: VertexSet) -> VertexSet:
        self._check(other)
        return VertexSet(self.n, self._words & ~other._words)

    def issubset(self, other: VertexSet) -> bool:
        self._check(other)
        return not np.any(self._words & ~other._words)

    __le__ = issubset
