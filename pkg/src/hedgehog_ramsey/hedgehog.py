"""Hedgehog certificates: embedding, independent verification, Hall witnesses."""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from math import comb
from typing import Iterable, Sequence

import numpy as np

from . import _kernels as K
from .hypercolor import Color, TripleColoring, neighborhood, pairs_of
from .vertexset import VertexSet

Pair = tuple[int, int]


@dataclass(frozen=True)
class HedgehogEmbedding:
    """A monochromatic hedgehog: ordered body plus one spine vertex per body pair."""

    color: Color
    body: tuple[int, ...]
    spine: dict[Pair, int] = field(hash=False)

    @property
    def t(self) -> int:
        return len(self.body)

    def vertices(self) -> set[int]:
        return set(self.body) | set(self.spine.values())

    def relabel(self, mapping: Sequence[int]) -> HedgehogEmbedding:
        """The same hedgehog with every vertex x replaced by ``mapping[x]``."""
        body = tuple(int(mapping[v]) for v in self.body)
        spine = {}
        for (a, b), w in self.spine.items():
            x, y = int(mapping[a]), int(mapping[b])
            spine[(min(x, y), max(x, y))] = int(mapping[w])
        return HedgehogEmbedding(self.color, body, spine)


@dataclass(frozen=True)
class DeficiencyWitness:
    """Pairs F of body S whose outside neighborhood is smaller than |F|."""

    color: Color
    body: tuple[int, ...]
    pairs: tuple[Pair, ...]
    witness_count: int

    @property
    def deficiency(self) -> int:
        return len(self.pairs) - self.witness_count


def _as_body(body: VertexSet | Iterable[int]) -> tuple[int, ...]:
    if isinstance(body, VertexSet):
        return tuple(body)
    return tuple(int(x) for x in body)


def hopcroft_karp(adj: Sequence[Sequence[int]]) -> dict[int, int]:
    """Maximum matching of left vertices ``range(len(adj))`` into right vertices.

    Breadth-first layering followed by depth-first augmentation along the
    layers; neighbors are tried in the order given.
    """
    match_l: dict[int, int] = {}
    match_r: dict[int, int] = {}
    inf = len(adj) + 1

    while True:
        dist = {}
        queue = deque()
        for u in range(len(adj)):
            if u not in match_l:
                dist[u] = 0
                queue.append(u)
        found = False
        while queue:
            u = queue.popleft()
            for w in adj[u]:
                nxt = match_r.get(w)
                if nxt is None:
                    found = True
                elif nxt not in dist:
                    dist[nxt] = dist[u] + 1
                    queue.append(nxt)
        if not found:
            return match_l

        def augment(u: int) -> bool:
            for w in adj[u]:
                nxt = match_r.get(w)
                if nxt is None or (dist.get(nxt, inf) == dist[u] + 1 and augment(nxt)):
                    match_l[u] = w
                    match_r[w] = u
                    return True
            dist[u] = inf
            return False

        for u in range(len(adj)):
            if u not in match_l:
                augment(u)


def alternating_reach(
    adj: Sequence[Sequence[int]], match_l: dict[int, int], sources: Iterable[int] | None = None
) -> list[int]:
    """Left vertices reachable by alternating paths from ``sources``.

    Sources default to every unmatched left vertex; the result then has the
    largest Hall deficiency.  From a single unmatched vertex the deficiency
    is exactly one.
    """
    match_r = {w: u for u, w in match_l.items()}
    if sources is None:
        sources = (u for u in range(len(adj)) if u not in match_l)
    seen = set(sources)
    queue = deque(sorted(seen))
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            nxt = match_r.get(w)
            if nxt is not None and nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return sorted(seen)


def find_hedgehog(
    coloring: TripleColoring, color: Color, body: VertexSet | Iterable[int]
) -> HedgehogEmbedding | DeficiencyWitness:
    """Embed a ``color`` hedgehog on ``body`` or certify that none exists.

    Each body pair is joined to the outside vertices completing it to a triple
    of ``color``.  Only the first C(t, 2) such vertices are kept per pair: a
    pair with that many options can never belong to a Hall violator, so the
    truncated graph has a pair-perfect matching iff the full one does.

    On failure the witness is the smallest alternating-reach set grown from
    one unmatched pair.
    """
    body = _as_body(body)
    t = len(body)
    n = coloring.n
    if t < 2:
        raise ValueError("body needs at least two vertices")
    if len(set(body)) != t:
        raise ValueError("body vertices must be distinct")
    coloring._check_vertices(*body)
    if t + comb(t, 2) > n:
        raise ValueError(f"a hedgehog with t={t} does not fit in n={n} vertices")

    pairs = pairs_of(body)
    inside = np.zeros(n, dtype=bool)
    inside[list(body)] = True
    outside = np.flatnonzero(~inside)
    red, _, params = coloring._fns()
    want = color is Color.RED
    cap = len(pairs)
    adj = [K.first_matching(red, params, a, b, outside, want, cap).tolist() for a, b in pairs]

    match = hopcroft_karp(adj)
    if len(match) == len(pairs):
        spine = {pairs[i]: int(w) for i, w in match.items()}
        return HedgehogEmbedding(color, body, spine)

    # smallest violator reachable from a single unmatched pair
    reach = min(
        (alternating_reach(adj, match, [u]) for u in range(len(pairs)) if u not in match),
        key=lambda r: (len(r), r),
    )
    bad = tuple(pairs[i] for i in reach)
    count = len(neighborhood(coloring, color, bad) - VertexSet.from_iterable(n, body))
    return DeficiencyWitness(color, body, bad, count)


def verify_embedding(coloring: TripleColoring, emb: HedgehogEmbedding, t: int | None = None) -> list[str]:
    """Check every defining property of a hedgehog by direct color queries.

    Returns the list of violations; empty means the certificate is valid.
    """
    problems: list[str] = []
    n = coloring.n
    body = list(emb.body)
    if t is not None and len(body) != t:
        problems.append(f"body size {len(body)} != t={t}")
    if len(body) < 2:
        problems.append("body size below 2")
    if len(set(body)) != len(body):
        problems.append("body not distinct")
    spine_vals = list(emb.spine.values())
    every = body + spine_vals + [x for p in emb.spine for x in p]
    if any(not isinstance(x, (int, np.integer)) or not 0 <= x < n for x in every):
        problems.append("vertex out of range")
        return problems

    expected = set(pairs_of(body)) if len(set(body)) == len(body) else set()
    keys = {(min(p), max(p)) for p in emb.spine}
    missing = expected - keys
    extra = keys - expected
    if missing:
        problems.append(f"spine missing pair(s) {sorted(missing)[:5]}")
    if extra:
        problems.append(f"spine has pair(s) outside the body {sorted(extra)[:5]}")
    if len(set(spine_vals)) != len(spine_vals):
        problems.append("spine not injective")
    if set(spine_vals) & set(body):
        problems.append("spine meets body")

    wrong = []
    for (a, b), w in emb.spine.items():
        if len({a, b, w}) < 3:
            wrong.append((a, b, w))
        elif coloring.color_of(a, b, w) is not emb.color:
            wrong.append((a, b, w))
    if wrong:
        problems.append(f"wrong color on triple(s) {wrong[:5]}")
    return problems


def hall_margin(
    coloring: TripleColoring, color: Color, body: VertexSet | Iterable[int], pairs: Iterable[Sequence[int]]
) -> int:
    """|N^c(F)| - (|F| + t) for a nonempty pair set F of the body."""
    body = _as_body(body)
    F = [(min(a, b), max(a, b)) for a, b in pairs]
    if not F:
        raise ValueError("pair set must be nonempty")
    allowed = set(pairs_of(body))
    if not set(F) <= allowed:
        raise ValueError("pair set must lie inside the body")
    F = sorted(set(F))
    return len(neighborhood(coloring, color, F)) - (len(F) + len(body))


# ---------------------------------------------------------------------------
# certificate JSON


def to_certificate(
    emb: HedgehogEmbedding, n: int, coloring: str | None, seed: int | None = None, **extra
) -> dict:
    cert = {
        "color": emb.color.value,
        "t": emb.t,
        "n": int(n),
        "body": [int(v) for v in emb.body],
        "spine": [[a, b, int(w)] for (a, b), w in sorted(emb.spine.items())],
        "coloring": coloring,
        "seed": seed,
    }
    cert.update(extra)
    return cert


def from_certificate(cert: dict) -> HedgehogEmbedding:
    try:
        color = Color.parse(cert["color"])
        body = tuple(int(v) for v in cert["body"])
        spine = {}
        for entry in cert["spine"]:
            a, b, w = (int(x) for x in entry)
            spine[(min(a, b), max(a, b))] = w
        int(cert["t"])
        int(cert["n"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed certificate: {exc}") from exc
    return HedgehogEmbedding(color, body, spine)


def dumps_certificate(cert: dict) -> str:
    return json.dumps(cert, sort_keys=True, separators=(",", ":")) + "\n"
