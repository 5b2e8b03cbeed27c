"""2-colorings of the complete 3-uniform hypergraph, as query oracles.

Every coloring is implicit: a triple's color is computed on demand from a
small parameter block, so seeded families stay queryable at n ~ 10^5 where a
stored table (one bit per triple) would need terabytes.  The compiled scans in
``_kernels`` do the heavy counting; this module wraps them with argument
checking, the descriptor language used by the CLI and the on-disk formats.
"""

from __future__ import annotations

import enum
import itertools
import threading
from collections import OrderedDict
from fractions import Fraction
from math import comb
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from numba import njit, uint64

from . import _kernels as K
from .vertexset import VertexSet

MAX_EXPLICIT_N = 300
MAX_VERTICES = 1 << 21  # triple keys pack three 21-bit fields


class Color(enum.Enum):
    RED = "r"
    BLUE = "b"

    def flip(self) -> Color:
        return Color.BLUE if self is Color.RED else Color.RED

    @property
    def is_red(self) -> bool:
        return self is Color.RED

    @classmethod
    def parse(cls, text: str) -> Color:
        key = text.strip().lower()
        if key in ("r", "red"):
            return cls.RED
        if key in ("b", "blue"):
            return cls.BLUE
        raise ValueError(f"unknown color {text!r}")

    def __str__(self) -> str:
        return self.value


def _splitmix(x: int) -> int:
    mask = (1 << 64) - 1
    x = (x + 0x9E3779B97F4A7C15) & mask
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & mask
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & mask
    return x ^ (x >> 31)


def _threshold(p: float) -> tuple[np.uint64, bool]:
    """64-bit comparison threshold for a Bernoulli(p) lane, plus an all-hit flag."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("probability must lie in [0, 1]")
    if p == 1.0:
        return np.uint64(0), True
    return np.uint64(int(Fraction(p) * (1 << 64))), False


# implicit G(n, p) graphs up to this size are expanded to bit-rows (~n^2/8 bytes)
MATERIALIZE_GNP_N = 8192


def _check_n(n: int) -> int:
    n = int(n)
    if n < 0 or n > MAX_VERTICES:
        raise ValueError(f"vertex count must lie in [0, {MAX_VERTICES}]")
    return n


# ---------------------------------------------------------------------------
# graphs


class Graph:
    """Simple undirected graph on ``range(n)`` with an edge oracle."""

    n: int
    descriptor: str | None = None

    def _edge_fn(self):
        raise NotImplementedError

    def has_edge(self, u: int, v: int) -> bool:
        if u == v:
            return False
        fn, params = self._edge_fn()
        return bool(fn(params, int(u), int(v)))

    def to_bitgraph(self) -> BitGraph:
        raise NotImplementedError


class BitGraph(Graph):
    """Explicit graph stored as packed adjacency bit-rows."""

    def __init__(self, n: int, rows: np.ndarray | None = None, descriptor: str | None = None):
        self.n = _check_n(n)
        width = max(1, (self.n + 63) >> 6)
        if rows is None:
            rows = np.zeros((self.n, width), dtype=np.uint64)
        self.rows = np.ascontiguousarray(rows, dtype=np.uint64)
        self.descriptor = descriptor

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], descriptor: str | None = None) -> BitGraph:
        g = cls(n, descriptor=descriptor)
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range")
            g.rows[u, v >> 6] |= np.uint64(1 << (v & 63))
            g.rows[v, u >> 6] |= np.uint64(1 << (u & 63))
        return g

    @classmethod
    def from_adjacency(cls, adj: np.ndarray, descriptor: str | None = None) -> BitGraph:
        adj = np.asarray(adj, dtype=bool)
        n = adj.shape[0]
        if np.any(np.diag(adj)) or not np.array_equal(adj, adj.T):
            raise ValueError("adjacency must be symmetric and loop-free")
        g = cls(n, descriptor=descriptor)
        for v in range(n):
            g.rows[v] = VertexSet.from_mask(adj[v])._words if n else g.rows[v]
        return g

    @classmethod
    def complete(cls, n: int) -> BitGraph:
        adj = ~np.eye(n, dtype=bool)
        return cls.from_adjacency(adj)

    @classmethod
    def star(cls, n: int, center: int = 0) -> BitGraph:
        return cls.from_edges(n, ((center, v) for v in range(n) if v != center))

    @classmethod
    def path(cls, n: int) -> BitGraph:
        return cls.from_edges(n, ((v, v + 1) for v in range(n - 1)))

    def _edge_fn(self):
        return K.bitrow_edge, (self.rows,)

    def has_edge(self, u: int, v: int) -> bool:
        return u != v and bool((int(self.rows[u, v >> 6]) >> (v & 63)) & 1)

    def adjacency(self) -> np.ndarray:
        bits = np.unpackbits(self.rows.view(np.uint8), axis=1, bitorder="little")
        return bits[:, : self.n].astype(bool)

    def neighbors(self, v: int) -> np.ndarray:
        return VertexSet(self.n, self.rows[v].copy()).to_array() if self.n else np.empty(0, np.int64)

    def degree(self, v: int) -> int:
        return int(np.bitwise_count(self.rows[v]).sum())

    def edges(self) -> list[tuple[int, int]]:
        adj = self.adjacency()
        us, vs = np.nonzero(np.triu(adj, 1))
        return list(zip(us.tolist(), vs.tolist()))

    def to_bitgraph(self) -> BitGraph:
        return self


@njit
def _materialize_gnp(params, n, width):
    rows = np.zeros((n, width), dtype=np.uint64)
    for u in range(n):
        for v in range(u + 1, n):
            if K.gnp_edge(params, u, v):
                rows[u, v >> 6] |= uint64(1) << uint64(v & 63)
                rows[v, u >> 6] |= uint64(1) << uint64(u & 63)
    return rows


class GnpGraph(Graph):
    """Implicit Erdos-Renyi graph: each edge is a hashed Bernoulli(p) draw."""

    def __init__(self, n: int, p: float, seed: int):
        self.n = _check_n(n)
        self.p = float(p)
        self.seed = int(seed)
        thr, full = _threshold(self.p)
        self._params = (np.uint64(_splitmix(self.seed ^ 0x6E70_6765)), thr, full)
        self.descriptor = f"gnp:p={self.p!r}:seed={self.seed}"

    def _edge_fn(self):
        return K.gnp_edge, self._params

    def to_bitgraph(self) -> BitGraph:
        width = max(1, (self.n + 63) >> 6)
        rows = _materialize_gnp(self._params, self.n, width)
        return BitGraph(self.n, rows, descriptor=self.descriptor)


# ---------------------------------------------------------------------------
# colorings


class TripleColoring:
    """Oracle assigning RED or BLUE to every 3-subset of ``range(n)``."""

    n: int
    descriptor: str | None = None

    def _fns(self):
        """(red, pair_counts, params) for the compiled kernels."""
        raise NotImplementedError

    def _check_vertices(self, *vs: int) -> None:
        for v in vs:
            if not isinstance(v, (int, np.integer)) or not 0 <= v < self.n:
                raise ValueError(f"vertex {v!r} out of range for n={self.n}")
        if len(set(int(v) for v in vs)) != len(vs):
            raise ValueError(f"vertices must be distinct, got {vs}")

    def color_of(self, u: int, v: int, w: int) -> Color:
        self._check_vertices(u, v, w)
        red, _, params = self._fns()
        return Color.RED if red(params, int(u), int(v), int(w)) else Color.BLUE

    def red_mask(self, u: int, v: int, ws: np.ndarray) -> np.ndarray:
        """Whether {u, v, w} is red, for every w in ``ws`` (no argument checks)."""
        red, _, params = self._fns()
        return K.red_mask(red, params, int(u), int(v), np.asarray(ws, dtype=np.int64))

    def pair_counts(self, u: int, v: int, cap_b: int | None = None, cap_r: int | None = None):
        """(blue, red, complete) for the pair uv, stopping once both exceed their caps."""
        self._check_vertices(u, v)
        _, pc, params = self._fns()
        cap_b = self.n if cap_b is None else int(cap_b)
        cap_r = self.n if cap_r is None else int(cap_r)
        b, r, done = pc(params, self.n, int(u), int(v), cap_b, cap_r)
        return int(b), int(r), bool(done)

    def flipped(self) -> TripleColoring:
        return FlippedColoring(self)

    def __repr__(self) -> str:
        return f"{type(self).__name__}(n={self.n}, {self.descriptor!r})"


class ConstantColoring(TripleColoring):
    def __init__(self, n: int, color: Color):
        self.n = _check_n(n)
        self.color = color
        self._params = (color is Color.RED,)
        self.descriptor = "allred" if color is Color.RED else "allblue"

    def _fns(self):
        return K.constant_red, K.constant_pair_counts, self._params

    def flipped(self) -> TripleColoring:
        return ConstantColoring(self.n, self.color.flip())


def all_red(n: int) -> ConstantColoring:
    return ConstantColoring(n, Color.RED)


def all_blue(n: int) -> ConstantColoring:
    return ConstantColoring(n, Color.BLUE)


class RandomColoring(TripleColoring):
    """Each triple independently red with probability ``p_red``.

    The color of {a < b < c} is lane ``c % 64`` of a hash keyed on
    ``(seed, a, b, c // 64)``; thresholds are exact to 2^-64.
    """

    def __init__(self, n: int, p_red: float, seed: int):
        self.n = _check_n(n)
        self.p_red = float(p_red)
        self.seed = int(seed)
        thr, full = _threshold(self.p_red)
        self._params = (np.uint64(_splitmix(self.seed ^ 0x7472_6970)), thr, full)
        self.descriptor = f"random:p={self.p_red!r}:seed={self.seed}"

    def _fns(self):
        return K.random_red, K.random_pair_counts, self._params


class SimpleColoring(TripleColoring):
    """Blue iff the triple spans at least one edge of the base graph."""

    def __init__(self, graph: Graph):
        self.graph = graph
        self.n = graph.n
        if isinstance(graph, GnpGraph) and graph.n <= MATERIALIZE_GNP_N:
            graph = graph.to_bitgraph()
        edge, params = graph._edge_fn()
        red, pc = K.simple_fns(edge)
        if isinstance(graph, BitGraph):
            pc = K.bitrow_pair_counts
        self._kernel = (red, pc, params)
        self.descriptor = graph.descriptor if graph.descriptor else None

    def _fns(self):
        return self._kernel


class ExplicitColoring(TripleColoring):
    """One stored bit per triple in colex order; small n only."""

    def __init__(self, n: int, red_bits: np.ndarray, descriptor: str | None = None):
        self.n = _check_n(n)
        if self.n > MAX_EXPLICIT_N:
            raise ValueError(f"explicit colorings are limited to n <= {MAX_EXPLICIT_N}")
        bits = np.ascontiguousarray(red_bits, dtype=np.uint8)
        if bits.shape != (comb(self.n, 3),):
            raise ValueError("need exactly one bit per triple")
        self.bits = bits
        self.descriptor = descriptor
        self._pc = K.generic_pair_counts(K.explicit_red)

    @classmethod
    def from_red_triples(cls, n: int, triples: Iterable[Sequence[int]], descriptor: str | None = None):
        bits = np.zeros(comb(n, 3), dtype=np.uint8)
        for t in triples:
            a, b, c = sorted(int(x) for x in t)
            if a == b or b == c or a < 0 or c >= n:
                raise ValueError(f"bad triple {tuple(t)}")
            bits[comb(c, 3) + comb(b, 2) + a] = 1
        return cls(n, bits, descriptor)

    @classmethod
    def from_function(cls, n: int, is_red, descriptor: str | None = None):
        bits = np.zeros(comb(n, 3), dtype=np.uint8)
        for i, (a, b, c) in enumerate(colex_triples(n)):
            bits[i] = 1 if is_red(a, b, c) else 0
        return cls(n, bits, descriptor)

    @classmethod
    def snapshot(cls, coloring: TripleColoring) -> ExplicitColoring:
        red, _, params = coloring._fns()
        return cls(coloring.n, K.red_bits_colex(red, params, coloring.n), coloring.descriptor)

    def _fns(self):
        return K.explicit_red, self._pc, (self.bits,)

    def red_triples(self) -> list[tuple[int, int, int]]:
        return [t for t, bit in zip(colex_triples(self.n), self.bits) if bit]


def colex_triples(n: int):
    """All triples (a < b < c) of ``range(n)`` in colex order."""
    for c in range(n):
        for b in range(c):
            for a in range(b):
                yield (a, b, c)


class RestrictedColoring(TripleColoring):
    """The coloring induced on a vertex subset, relabeled to ``range(len(X))``.

    Local vertex ``i`` stands for parent vertex ``vertex_map[i]``; the map is
    ascending.
    """

    def __init__(self, parent: TripleColoring, vertices: np.ndarray):
        vertices = np.asarray(vertices, dtype=np.int64)
        if isinstance(parent, RestrictedColoring):
            vertices = parent.vertex_map[vertices]
            parent = parent.parent
        self.parent = parent
        self.vertex_map = vertices
        self.n = int(vertices.shape[0])
        self._identity = self.n == parent.n and bool(np.array_equal(vertices, np.arange(self.n)))
        if self._identity:
            self._kernel = parent._fns()
        else:
            pred, _, pparams = parent._fns()
            red = K.restricted_red(pred)
            self._kernel = (red, K.generic_pair_counts(red), (pparams, self.vertex_map))
        self.descriptor = parent.descriptor

    def _fns(self):
        return self._kernel

    def to_parent(self, v: int) -> int:
        return int(self.vertex_map[v])


class FlippedColoring(TripleColoring):
    """Every triple's color swapped."""

    def __init__(self, parent: TripleColoring):
        self.parent = parent
        self.n = parent.n
        pred, ppc, params = parent._fns()
        red, pc = K.flipped_fns(pred, ppc)
        self._kernel = (red, pc, params)
        self.descriptor = None if parent.descriptor is None else f"flip({parent.descriptor})"

    def _fns(self):
        return self._kernel

    def flipped(self) -> TripleColoring:
        return self.parent


def make_simple_coloring(graph: Graph) -> SimpleColoring:
    return SimpleColoring(graph)


def make_random_coloring(n: int, p_red: float, seed: int) -> RandomColoring:
    return RandomColoring(n, p_red, seed)


def restrict(coloring: TripleColoring, vertices: VertexSet | Iterable[int]) -> RestrictedColoring:
    if isinstance(vertices, VertexSet):
        if vertices.n != coloring.n:
            raise ValueError("vertex set is over a different ground set")
        members = vertices.to_array()
    else:
        members = np.unique(np.fromiter((int(x) for x in vertices), dtype=np.int64))
        if members.size and (members[0] < 0 or members[-1] >= coloring.n):
            raise ValueError("vertex out of range")
    if members.size < 3:
        raise ValueError("restriction needs at least 3 vertices")
    return RestrictedColoring(coloring, members)


def color_of(coloring: TripleColoring, u: int, v: int, w: int) -> Color:
    return coloring.color_of(u, v, w)


# ---------------------------------------------------------------------------
# degree queries


class DegreeOracle:
    """Pair color-degree queries over a fixed coloring.

    Exact degrees are memoised in a bounded LRU table guarded by a lock, so
    an oracle may be shared by concurrent readers.
    """

    def __init__(self, coloring: TripleColoring, cache_size: int = 1 << 16):
        self.coloring = coloring
        self.n = coloring.n
        self._cache: OrderedDict[tuple[int, int], tuple[int, int]] = OrderedDict()
        self._cache_size = cache_size
        self._lock = threading.Lock()

    def _check_pair(self, u: int, v: int) -> None:
        if u == v:
            raise ValueError("pair degree needs two distinct vertices")
        self.coloring._check_vertices(u, v)

    def pair_degrees(self, u: int, v: int) -> tuple[int, int]:
        """Exact (blue, red) degrees of the pair uv."""
        self._check_pair(u, v)
        key = (min(u, v), max(u, v))
        with self._lock:
            hit = self._cache.get(key)
            if hit is not None:
                self._cache.move_to_end(key)
                return hit
        b, r, _ = self.coloring.pair_counts(u, v)
        with self._lock:
            self._cache[key] = (b, r)
            if len(self._cache) > self._cache_size:
                self._cache.popitem(last=False)
        return b, r

    def pair_degree(self, u: int, v: int, color: Color) -> int:
        b, r = self.pair_degrees(u, v)
        return r if color is Color.RED else b

    def pair_degree_at_most(self, u: int, v: int, color: Color, m: int) -> bool:
        self._check_pair(u, v)
        if color is Color.RED:
            _, r, _ = self.coloring.pair_counts(u, v, cap_b=-1, cap_r=m)
            return r <= m
        b, _, _ = self.coloring.pair_counts(u, v, cap_b=m, cap_r=-1)
        return b <= m

    def degrees_at_most(self, us: np.ndarray, vs: np.ndarray, color: Color, m: int) -> np.ndarray:
        _, pc, params = self.coloring._fns()
        us = np.asarray(us, dtype=np.int64)
        vs = np.asarray(vs, dtype=np.int64)
        return K.degrees_at_most(pc, params, self.n, us, vs, color is Color.RED, int(m))

    def exact_degrees(self, us: np.ndarray, vs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        _, pc, params = self.coloring._fns()
        return K.exact_degrees(pc, params, self.n, np.asarray(us, dtype=np.int64), np.asarray(vs, dtype=np.int64))

    def thin_profile(self, v: int, us: np.ndarray, cap: int) -> tuple[np.ndarray, np.ndarray]:
        """Blue and red degrees of each pair (u, v) that are <= cap, else -1."""
        _, pc, params = self.coloring._fns()
        return K.thin_scan(pc, params, self.n, int(v), np.asarray(us, dtype=np.int64), int(cap))

    def u_set(self, color: Color, m: int, v: int, within: VertexSet | None = None) -> VertexSet:
        """{u in X - v : opposite-color degree of uv <= m}; degrees are global."""
        self.coloring._check_vertices(v)
        if within is None:
            cand = np.arange(self.n, dtype=np.int64)
        else:
            if within.n != self.n:
                raise ValueError("vertex set is over a different ground set")
            cand = within.to_array()
        cand = cand[cand != v]
        mask = np.zeros(self.n, dtype=bool)
        if cand.size:
            ok = self.degrees_at_most(cand, np.full(cand.size, v, dtype=np.int64), color.flip(), m)
            mask[cand[ok]] = True
        return VertexSet.from_mask(mask)


def pair_degree(oracle: DegreeOracle, u: int, v: int, color: Color) -> int:
    return oracle.pair_degree(u, v, color)


def pair_degree_at_most(oracle: DegreeOracle, u: int, v: int, color: Color, m: int) -> bool:
    return oracle.pair_degree_at_most(u, v, color, m)


def u_set(oracle: DegreeOracle, color: Color, m: int, v: int, within: VertexSet | None = None) -> VertexSet:
    return oracle.u_set(color, m, v, within)


def _pair_arrays(coloring: TripleColoring, pairs: Iterable[Sequence[int]]) -> tuple[np.ndarray, np.ndarray]:
    pairs = [tuple(int(x) for x in p) for p in pairs]
    if not pairs:
        raise ValueError("pair set must be nonempty")
    for u, v in pairs:
        coloring._check_vertices(u, v)
    arr = np.array(pairs, dtype=np.int64)
    return arr[:, 0].copy(), arr[:, 1].copy()


def neighborhood(coloring: TripleColoring, color: Color, pairs: Iterable[Sequence[int]]) -> VertexSet:
    """All w completing some pair of ``pairs`` to a triple of ``color``."""
    pu, pv = _pair_arrays(coloring, pairs)
    red, _, params = coloring._fns()
    mask = K.neighborhood_mask(red, params, coloring.n, pu, pv, color is Color.RED)
    return VertexSet.from_mask(mask)


def red_degree_table(coloring: TripleColoring) -> np.ndarray:
    """Full n x n red pair-degree matrix (diagonal 0).  O(n^3); small n only."""
    red, _, params = coloring._fns()
    return K.red_degree_table(red, params, coloring.n)


# ---------------------------------------------------------------------------
# files and descriptors


def read_graph(path: str | Path) -> BitGraph:
    lines = [ln.split() for ln in Path(path).read_text().splitlines()]
    lines = [ln for ln in lines if ln and not ln[0].startswith("#")]
    if not lines:
        raise ValueError(f"{path}: empty graph file")
    n = int(lines[0][0])
    edges = []
    for lineno, fields in enumerate(lines[1:], start=2):
        if len(fields) != 2:
            raise ValueError(f"{path}: line {lineno}: expected 'u v'")
        edges.append((int(fields[0]), int(fields[1])))
    return BitGraph.from_edges(n, edges, descriptor=f"simple:{path}")


def write_graph(graph: Graph, path: str | Path) -> None:
    g = graph.to_bitgraph()
    body = "".join(f"{u} {v}\n" for u, v in g.edges())
    Path(path).write_text(f"{g.n}\n{body}")


def read_coloring_file(path: str | Path) -> ExplicitColoring:
    raw = [ln.split() for ln in Path(path).read_text().splitlines()]
    raw = [ln for ln in raw if ln and not ln[0].startswith("#")]
    if not raw:
        raise ValueError(f"{path}: empty coloring file")
    head = raw[0]
    n = int(head[0])
    default = Color.BLUE
    for flag in head[1:]:
        if flag == "default=r":
            default = Color.RED
        elif flag != "default=b":
            raise ValueError(f"{path}: unknown header flag {flag!r}")
    listed = default.flip()
    triples = []
    for lineno, fields in enumerate(raw[1:], start=2):
        if len(fields) != 4 or Color.parse(fields[3]) is not listed:
            raise ValueError(f"{path}: line {lineno}: expected 'u v w {listed}'")
        triples.append(tuple(int(x) for x in fields[:3]))
    desc = f"file:{path}"
    col = ExplicitColoring.from_red_triples(n, triples if listed is Color.RED else [], desc)
    if default is Color.RED:
        col.bits[:] = 1
        for t in triples:
            a, b, c = sorted(t)
            col.bits[comb(c, 3) + comb(b, 2) + a] = 0
    return col


def write_coloring_file(coloring: TripleColoring, path: str | Path) -> None:
    explicit = coloring if isinstance(coloring, ExplicitColoring) else ExplicitColoring.snapshot(coloring)
    lines = [str(explicit.n)]
    lines += [f"{a} {b} {c} r" for a, b, c in explicit.red_triples()]
    Path(path).write_text("\n".join(lines) + "\n")


def _parse_fields(text: str, desc: str) -> dict[str, str]:
    out = {}
    for part in text.split(":"):
        if "=" not in part:
            raise ValueError(f"malformed descriptor {desc!r}")
        k, v = part.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def parse_descriptor(desc: str, n: int | None = None) -> TripleColoring:
    """Build a coloring from a descriptor string.

    ``allred``, ``allblue``, ``random:p=<p>:seed=<s>`` and ``gnp:p=<p>:seed=<s>``
    need ``n``; ``simple:<path>`` and ``file:<path>`` read it from the file.
    """
    kind, _, rest = desc.partition(":")
    if kind in ("allred", "allblue", "random", "gnp") and n is None:
        raise ValueError(f"descriptor {desc!r} needs a vertex count")
    if kind == "allred" and not rest:
        return all_red(n)
    if kind == "allblue" and not rest:
        return all_blue(n)
    if kind in ("random", "gnp"):
        fields = _parse_fields(rest, desc)
        try:
            p = float(fields["p"])
            seed = int(fields["seed"])
        except (KeyError, ValueError) as exc:
            raise ValueError(f"descriptor {desc!r} needs p=<float> and seed=<int>") from exc
        if kind == "random":
            return make_random_coloring(n, p, seed)
        return make_simple_coloring(GnpGraph(n, p, seed))
    if kind == "simple" and rest:
        return make_simple_coloring(read_graph(rest))
    if kind == "file" and rest:
        return read_coloring_file(rest)
    raise ValueError(f"unknown coloring descriptor {desc!r}")


def pairs_of(vertices: Sequence[int]) -> list[tuple[int, int]]:
    """All unordered pairs of ``vertices`` as sorted tuples, lexicographic."""
    return [(min(a, b), max(a, b)) for a, b in itertools.combinations(sorted(vertices), 2)]
