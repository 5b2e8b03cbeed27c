"""Hedgehogs in colorings induced by a graph (blue iff the triple spans an edge)."""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Iterable, Mapping, Sequence

import numpy as np

from .hedgehog import HedgehogEmbedding
from .hypercolor import BitGraph, Color, Graph, TripleColoring, make_simple_coloring, pairs_of


@dataclass(frozen=True)
class SimpleInfo:
    branch: str  # "blue" or "red"
    fail_index: int | None
    pool_size: int | None


def _live_degrees(adj: np.ndarray, alive: np.ndarray) -> np.ndarray:
    return (adj & alive[None, :]).sum(axis=1) * alive


def greedy_spine_assign(
    coloring: TripleColoring,
    body: Sequence[int],
    color: Color,
    reserved: Mapping[int, Sequence[int]] | None = None,
    pool: Iterable[int] | None = None,
) -> dict[tuple[int, int], int]:
    """First-fit spine for ``body``.

    With ``reserved``, the pair of body positions i < j draws from
    reserved[body[j]]; otherwise every pair draws the lowest unused ``pool``
    vertex completing it to a ``color`` triple.
    """
    used: set[int] = set()
    spine: dict[tuple[int, int], int] = {}
    if reserved is not None:
        for j, vj in enumerate(body):
            spare = [w for w in sorted(reserved.get(vj, ())) if w not in used]
            if len(spare) < j:
                raise RuntimeError(f"reserve of {vj} holds {len(spare)} vertices, needs {j}")
            for i in range(j):
                w = spare[i]
                used.add(w)
                spine[(min(body[i], vj), max(body[i], vj))] = w
        return spine
    if pool is None:
        raise ValueError("need either reserved sets or a pool")
    cands = sorted(set(int(w) for w in pool) - set(body))
    for a, b in pairs_of(body):
        for w in cands:
            if w not in used and coloring.color_of(a, b, w) is color:
                used.add(w)
                spine[(a, b)] = w
                break
        else:
            raise RuntimeError(f"pool exhausted for pair ({a}, {b})")
    return spine


def find_hedgehog_simple(graph: Graph, t: int, with_info: bool = False):
    """Monochromatic H_t in the coloring induced by ``graph`` when n >= t^2 + t.

    Peels v_{t-1}, ..., v_0 with v_i of degree >= i in the shrinking pool and
    reserves i of its neighbors; if some index has no such vertex, the pool has
    maximum degree below i and a greedy independent set carries a red hedgehog.
    """
    n = graph.n
    if t < 2:
        raise ValueError("t must be at least 2")
    if n < t * t + t:
        raise ValueError(f"n={n} is below t^2 + t = {t * t + t}")
    bg: BitGraph = graph.to_bitgraph()
    coloring = make_simple_coloring(bg)
    adj = bg.adjacency()
    alive = np.ones(n, dtype=bool)

    picked: dict[int, int] = {}
    reserved: dict[int, list[int]] = {}
    fail = None
    for i in range(t - 1, -1, -1):
        deg = _live_degrees(adj, alive)
        ok = np.flatnonzero(alive & (deg >= i))
        if ok.size == 0:
            fail = i
            break
        v = int(ok[0])
        nbrs = np.flatnonzero(adj[v] & alive)[:i].tolist()
        picked[i] = v
        reserved[v] = nbrs
        alive[v] = False
        alive[nbrs] = False

    if fail is None:
        body = tuple(picked[i] for i in range(t))
        spine = greedy_spine_assign(coloring, body, Color.BLUE, reserved=reserved)
        emb = HedgehogEmbedding(Color.BLUE, body, spine)
        return (emb, SimpleInfo("blue", None, None)) if with_info else emb

    pool = np.flatnonzero(alive)
    need = comb(t + 1, 2) + comb(fail + 2, 2)
    if pool.size < need:
        raise RuntimeError(f"pool of {pool.size} vertices after failing at {fail}, expected >= {need}")
    free = alive.copy()
    indep = []
    for v in pool.tolist():
        if not free[v]:
            continue
        indep.append(v)
        free[v] = False
        free &= ~adj[v]
        if len(indep) == t:
            break
    if len(indep) < t:
        raise RuntimeError(f"independent set of size {len(indep)} < t in a pool of max degree < {fail}")
    body = tuple(indep)
    spine = greedy_spine_assign(coloring, body, Color.RED, pool=pool.tolist())
    emb = HedgehogEmbedding(Color.RED, body, spine)
    return (emb, SimpleInfo("red", fail, int(pool.size))) if with_info else emb
