"""Red hedgehogs in balanced colorings by sampling, pruning and matching.

A coloring is balanced with parameter c when every blue U-set
U^b_{<=m}(v) has at most c*m members for m in [2t, m_max].  In that regime a
random vertex sample of expected size 4t has, with constant probability,
few pairs of small red degree; dropping an endpoint of each of the 2t
smallest pairs and trimming to t vertices leaves a body on which the red
matching condition holds.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Iterable

import numpy as np

from .hedgehog import DeficiencyWitness, HedgehogEmbedding, find_hedgehog, verify_embedding
from .hypercolor import Color, DegreeOracle, TripleColoring, pairs_of
from .peel import m_max
from .vertexset import VertexSet


class BalancedInvariantError(RuntimeError):
    """An accepted, pruned sample broke a bound the construction guarantees."""


@dataclass(frozen=True)
class SampleReport:
    sample: tuple[int, ...]
    counts: dict[int, int]
    accepted: bool
    reason: str

    @property
    def size(self) -> int:
        return len(self.sample)

    def to_json(self) -> dict:
        return {"size": self.size, "accepted": self.accepted, "reason": self.reason}


@dataclass
class BalancedRunStats:
    max_retries: int
    samples: list[SampleReport] = field(default_factory=list)
    outcome: str = "pending"
    body: tuple[int, ...] | None = None

    @property
    def retries(self) -> int:
        return len(self.samples)

    def to_json(self) -> dict:
        return {"retries": self.retries, "samples": [s.to_json() for s in self.samples]}


def sample_rng(seed: int, retry: int) -> np.random.Generator:
    """Independent generator for retry ``retry`` under master ``seed``."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(retry)]))


def _red_degrees(oracle: DegreeOracle, pairs: list[tuple[int, int]]) -> np.ndarray:
    if not pairs:
        return np.empty(0, dtype=np.int64)
    us, vs = (np.array(x, dtype=np.int64) for x in zip(*pairs))
    return oracle.exact_degrees(us, vs)[1]


def report_for(coloring: TripleColoring, t: int, sample: Iterable[int], oracle: DegreeOracle | None = None) -> SampleReport:
    """Evaluate the two acceptance conditions on a given vertex set."""
    oracle = oracle or DegreeOracle(coloring)
    sample = tuple(sorted(int(v) for v in sample))
    pairs = pairs_of(sample)
    dr = np.sort(_red_degrees(oracle, pairs))
    mults = range(2 * t, m_max(t) + 1, t)
    counts = {m: int(np.searchsorted(dr, m, side="right")) for m in mults}
    if len(sample) <= 3 * t:
        return SampleReport(sample, counts, False, "small sample")
    for m, k in counts.items():
        if k > m - t:
            return SampleReport(sample, counts, False, f"{k} pairs with red degree <= {m}, limit {m - t}")
    return SampleReport(sample, counts, True, "accepted")


def sample_body(
    coloring: TripleColoring, t: int, seed: int, retry: int = 0, oracle: DegreeOracle | None = None
) -> SampleReport:
    """Include each vertex independently with probability 4t/n and test the sample."""
    n = coloring.n
    if n < 4 * t:
        raise ValueError(f"n={n} is below 4t={4 * t}")
    rng = sample_rng(seed, retry)
    picked = np.flatnonzero(rng.random(n) < 4 * t / n)
    return report_for(coloring, t, picked.tolist(), oracle)


def prune_body(
    coloring: TripleColoring, sample: SampleReport | Iterable[int], t: int, oracle: DegreeOracle | None = None
) -> tuple[int, ...]:
    """Cut an accepted sample down to t vertices.

    Pairs are ranked by (red degree, pair); each of the first 2t pairs not
    already broken loses its lower endpoint, then the highest ids go until t
    remain.  The result is checked against the pair-count bound at every m.
    """
    oracle = oracle or DegreeOracle(coloring)
    report = sample if isinstance(sample, SampleReport) else report_for(coloring, t, sample, oracle)
    if not report.accepted:
        raise ValueError(f"sample not accepted: {report.reason}")
    S = list(report.sample)
    pairs = pairs_of(S)
    dr = _red_degrees(oracle, pairs)
    order = sorted(range(len(pairs)), key=lambda i: (int(dr[i]), pairs[i]))

    removed: set[int] = set()
    for i in order[: 2 * t]:
        a, b = pairs[i]
        if a not in removed and b not in removed:
            removed.add(a)
    survivors = [v for v in S if v not in removed]
    if len(survivors) < t:
        raise BalancedInvariantError("pair cover removed too many vertices")
    body = tuple(survivors[:t])

    deg = {pairs[i]: int(dr[i]) for i in range(len(pairs))}
    body_deg = np.sort(np.array([deg[p] for p in pairs_of(body)], dtype=np.int64))
    for m in range(2 * t, m_max(t) - t + 1):
        k = int(np.searchsorted(body_deg, m, side="right"))
        if k > m - 2 * t:
            raise BalancedInvariantError(f"pruned body has {k} pairs with red degree <= {m} > {m - 2 * t}")
    return body


def find_red_hedgehog_balanced(
    coloring: TripleColoring, t: int, max_retries: int = 10, seed: int = 0
) -> tuple[HedgehogEmbedding | None, BalancedRunStats]:
    """Sample, prune and match until a verified red hedgehog appears or retries run out."""
    n = coloring.n
    if max_retries < 1:
        raise ValueError("max_retries must be at least 1")
    if n < 4 * t:
        raise ValueError(f"n={n} is below 4t={4 * t}")
    stats = BalancedRunStats(max_retries)
    if n < t + comb(t, 2):
        stats.outcome = "does not fit"
        return None, stats
    oracle = DegreeOracle(coloring)
    for retry in range(max_retries):
        report = sample_body(coloring, t, seed, retry, oracle)
        stats.samples.append(report)
        if not report.accepted:
            continue
        body = prune_body(coloring, report, t, oracle)
        result = find_hedgehog(coloring, Color.RED, body)
        if isinstance(result, DeficiencyWitness):
            raise BalancedInvariantError(
                f"pruned body {body} has a red deficiency witness of size {len(result.pairs)}"
            )
        problems = verify_embedding(coloring, result, t)
        if problems:
            raise BalancedInvariantError(f"matcher produced an invalid embedding: {problems}")
        stats.outcome = "found"
        stats.body = body
        return result, stats
    stats.outcome = "retries exhausted"
    return None, stats


def check_balanced(
    coloring: TripleColoring, c: float, t: int, vertices: VertexSet | Iterable[int]
) -> list[tuple[int, int]]:
    """(v, m) with |U^b_{<=m}(v, V)| > c*m, over the given vertices and m in [2t, m_max]."""
    if c < 1:
        raise ValueError("c must be at least 1")
    oracle = DegreeOracle(coloring)
    n = coloring.n
    top = m_max(t)
    stages = np.arange(2 * t, top + 1)
    everyone = np.arange(n, dtype=np.int64)
    out = []
    for v in vertices:
        v = int(v)
        us = everyone[everyone != v]
        _, rthin = oracle.thin_profile(v, us, top)
        vals = np.sort(rthin[rthin >= 0])
        counts = np.searchsorted(vals, stages, side="right")
        out.extend((v, int(m)) for m, k in zip(stages, counts) if k > c * m)
    return out
