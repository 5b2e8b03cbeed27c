"""Brute-force ground truth for small instances."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb

import numpy as np

from .hedgehog import HedgehogEmbedding, find_hedgehog, verify_embedding
from .hypercolor import Color, ExplicitColoring, TripleColoring, colex_triples, pairs_of


class BudgetExceeded(RuntimeError):
    """The requested enumeration is larger than the caller's budget."""


def fits(n: int, t: int) -> bool:
    return t + comb(t, 2) <= n


def exhaustive_find(
    coloring: TripleColoring, t: int, color: Color, budget: int = 200_000
) -> HedgehogEmbedding | None:
    """First ``color`` hedgehog over all t-subsets as bodies, in lexicographic order.

    ``None`` is exact: no body admits an embedding.
    """
    n = coloring.n
    if t < 2:
        raise ValueError("t must be at least 2")
    if not fits(n, t):
        return None
    bodies = comb(n, t)
    if bodies > budget:
        raise BudgetExceeded(f"C({n}, {t}) = {bodies} bodies exceeds budget {budget}")
    for body in itertools.combinations(range(n), t):
        res = find_hedgehog(coloring, color, body)
        if isinstance(res, HedgehogEmbedding):
            return res
    return None


def _color_table(coloring: TripleColoring) -> dict[tuple[int, int, int], Color]:
    return {tri: coloring.color_of(*tri) for tri in itertools.combinations(range(coloring.n), 3)}


def backtrack_embeddable(table: dict, n: int, color: Color, body: tuple[int, ...]) -> dict | None:
    """Spine for ``body`` by plain depth-first search over pair assignments."""
    pairs = list(itertools.combinations(sorted(body), 2))
    outside = [w for w in range(n) if w not in body]
    spine: dict[tuple[int, int], int] = {}
    used: set[int] = set()

    def go(k: int) -> bool:
        if k == len(pairs):
            return True
        a, b = pairs[k]
        for w in outside:
            if w in used or table[tuple(sorted((a, b, w)))] is not color:
                continue
            used.add(w)
            spine[(a, b)] = w
            if go(k + 1):
                return True
            used.discard(w)
            del spine[(a, b)]
        return False

    return dict(spine) if go(0) else None


def backtrack_find(coloring: TripleColoring, t: int, color: Color, budget: int = 200_000) -> HedgehogEmbedding | None:
    """Independent cross-check of ``exhaustive_find`` sharing no matching code."""
    n = coloring.n
    if not fits(n, t):
        return None
    if comb(n, t) > budget:
        raise BudgetExceeded(f"C({n}, {t}) bodies exceeds budget {budget}")
    table = _color_table(coloring)
    for body in itertools.combinations(range(n), t):
        spine = backtrack_embeddable(table, n, color, body)
        if spine is not None:
            return HedgehogEmbedding(color, body, spine)
    return None


def hedgehog_masks(n: int, t: int) -> np.ndarray:
    """Every labelled copy of H_t in K_n^(3) as a bitmask over colex triple indices."""
    index = {tri: i for i, tri in enumerate(colex_triples(n))}
    masks = set()
    for body in itertools.combinations(range(n), t):
        pairs = pairs_of(body)
        outside = [w for w in range(n) if w not in body]
        for spines in itertools.permutations(outside, len(pairs)):
            m = 0
            for (a, b), w in zip(pairs, spines):
                m |= 1 << index[tuple(sorted((a, b, w)))]
            masks.add(m)
    return np.array(sorted(masks), dtype=np.uint64)


def min_coloring_search(n: int, t: int, budget: int = 10**9, chunk: int = 1 << 16) -> ExplicitColoring | None:
    """A 2-coloring of K_n^(3) with no monochromatic H_t, or ``None`` if every coloring has one.

    The first triple is fixed blue, since flipping all colors maps witnesses
    to witnesses.  Colorings are scanned in increasing order of their red-bit
    integer and the first witness is returned.
    """
    if t < 2:
        raise ValueError("t must be at least 2")
    N = comb(n, 3)
    if not fits(n, t):
        return ExplicitColoring(n, np.zeros(N, dtype=np.uint8), descriptor=None)
    if N > 63:
        raise BudgetExceeded(f"{N} triples is beyond the enumerable range")
    if N == 0:
        return ExplicitColoring(n, np.zeros(0, dtype=np.uint8))
    masks = hedgehog_masks(n, t)
    total = 1 << (N - 1)
    if total * masks.size > budget:
        raise BudgetExceeded(f"{total} colorings x {masks.size} copies exceeds budget {budget}")
    full = np.uint64((1 << N) - 1)
    for start in range(0, total, chunk):
        xs = np.arange(start, min(total, start + chunk), dtype=np.uint64) << np.uint64(1)
        blues = ~xs & full
        hit = np.zeros(xs.size, dtype=bool)
        for m in masks:
            hit |= (xs & m) == m
            hit |= (blues & m) == m
        free = np.flatnonzero(~hit)
        if free.size:
            x = int(xs[free[0]])
            bits = np.array([(x >> i) & 1 for i in range(N)], dtype=np.uint8)
            return ExplicitColoring(n, bits)
    return None


@dataclass(frozen=True)
class Comparison:
    t: int
    n: int
    pipeline_color: Color | None
    pipeline_path: str
    oracle_red: bool
    oracle_blue: bool

    @property
    def sound(self) -> bool:
        """A pipeline certificate is never issued where the oracle finds none of that color."""
        if self.pipeline_color is None:
            return True
        return self.oracle_red if self.pipeline_color is Color.RED else self.oracle_blue


def pipeline_vs_oracle(coloring: TripleColoring, t: int, seed: int = 0, budget: int = 200_000) -> Comparison:
    from .pipeline import solve

    res = solve(coloring, t, seed=seed)
    if res.embedding is not None and verify_embedding(coloring, res.embedding, t):
        raise RuntimeError("pipeline emitted an invalid certificate")
    red = exhaustive_find(coloring, t, Color.RED, budget) is not None
    blue = exhaustive_find(coloring, t, Color.BLUE, budget) is not None
    color = res.embedding.color if res.embedding is not None else None
    return Comparison(t, coloring.n, color, res.path, red, blue)
