"""Staged peeling with fractional penalty ledgers.

Stages run m = 2t .. m_max with m_max = 2t + C(t, 2).  Within a stage, any live
vertex v whose U-set in some color chi has at least 10m members is peeled:
v joins the chi-body, its first 10m U-members are charged t/m each (alpha),
the vertices w seeing few chi-triples through v and those members are charged
min(1/4, t/d) (beta), and anything whose alpha reaches 1/2 or beta reaches 1/4
leaves the pool.  The run stops once a body holds t vertices ("finished") or
after the last stage ("stuck").

Penalties are exact ``Fraction``s so the per-peel alpha mass 10t can be
asserted with equality.
"""

from __future__ import annotations

import json
import math
from collections import OrderedDict
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Iterable

import numpy as np

from . import _kernels as K
from .hypercolor import Color, DegreeOracle, TripleColoring
from .vertexset import VertexSet

QUARTER = Fraction(1, 4)
HALF = Fraction(1, 2)
TRACE_FORMAT = "hedgehog-peel-trace/1"


def m_max(t: int) -> int:
    return 2 * t + comb(t, 2)


def deletion_bound(t: int) -> float:
    return 200 * t * t * math.log(t)


def beta_mass_bound(t: int) -> float:
    return 20 * t * math.log(t)


def theorem_threshold(t: int) -> int:
    """Smallest n with n >= 200 t^2 ln t + 400 t^2."""
    return math.ceil(200 * t * t * math.log(t) + 400 * t * t)


def beta_increment(t: int, degree: int) -> Fraction:
    if degree == 0:
        return QUARTER
    return min(QUARTER, Fraction(t, degree))


@dataclass(frozen=True)
class PeelEvent:
    vertex: int
    color: Color
    m: int
    hat_u: tuple[int, ...]
    bad: tuple[int, ...]
    deleted: tuple[int, ...]
    alpha_mass: Fraction
    beta_mass: Fraction

    def to_json(self) -> dict:
        return {
            "v": self.vertex,
            "color": self.color.value,
            "m": self.m,
            "hat_u": list(self.hat_u),
            "bad": list(self.bad),
            "deleted": list(self.deleted),
            "alpha_mass": str(self.alpha_mass),
            "beta_mass": str(self.beta_mass),
        }

    @classmethod
    def from_json(cls, d: dict) -> PeelEvent:
        return cls(
            vertex=int(d["v"]),
            color=Color.parse(d["color"]),
            m=int(d["m"]),
            hat_u=tuple(int(x) for x in d["hat_u"]),
            bad=tuple(int(x) for x in d["bad"]),
            deleted=tuple(int(x) for x in d["deleted"]),
            alpha_mass=Fraction(d["alpha_mass"]),
            beta_mass=Fraction(d["beta_mass"]),
        )


@dataclass
class PeelTrace:
    t: int
    n: int
    coloring: str | None = None
    seed: int | None = None
    events: list[PeelEvent] = field(default_factory=list)

    def bodies(self) -> dict[Color, list[int]]:
        out: dict[Color, list[int]] = {Color.BLUE: [], Color.RED: []}
        for e in self.events:
            out[e.color].append(e.vertex)
        return out

    def finished_color(self) -> Color | None:
        for color, body in self.bodies().items():
            if len(body) >= self.t:
                return color
        return None

    def residual(self) -> VertexSet:
        alive = np.ones(self.n, dtype=bool)
        for e in self.events:
            alive[e.vertex] = False
            alive[list(e.deleted)] = False
        return VertexSet.from_mask(alive)

    def dumps(self) -> str:
        head = {
            "format": TRACE_FORMAT,
            "t": self.t,
            "n": self.n,
            "coloring": self.coloring,
            "seed": self.seed,
            "m_max": m_max(self.t),
        }
        lines = [json.dumps(head, sort_keys=True, separators=(",", ":"))]
        lines += [json.dumps(e.to_json(), sort_keys=True, separators=(",", ":")) for e in self.events]
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> PeelTrace:
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise ValueError("empty trace")
        head = json.loads(lines[0])
        if head.get("format") != TRACE_FORMAT:
            raise ValueError("not a peel trace")
        events = [PeelEvent.from_json(json.loads(ln)) for ln in lines[1:]]
        return cls(int(head["t"]), int(head["n"]), head.get("coloring"), head.get("seed"), events)


@dataclass
class PeelOutcome:
    """Either a finished body of t vertices or the stuck residual pool."""

    trace: PeelTrace
    color: Color | None = None
    body: tuple[int, ...] | None = None
    residual: VertexSet | None = None

    @property
    def finished(self) -> bool:
        return self.body is not None

    @property
    def kind(self) -> str:
        return "finished" if self.finished else "stuck"


class PeelState:
    """Live pool, bodies and the four penalty ledgers."""

    def __init__(self, coloring: TripleColoring, t: int, oracle: DegreeOracle | None = None):
        self.coloring = coloring
        self.oracle = oracle or DegreeOracle(coloring)
        self.t = t
        self.n = coloring.n
        self.m_max = m_max(t)
        self.m = 2 * t
        self.alive = np.ones(self.n, dtype=bool)
        self.bodies: dict[Color, list[int]] = {Color.BLUE: [], Color.RED: []}
        self.alpha: dict[Color, dict[int, Fraction]] = {Color.BLUE: {}, Color.RED: {}}
        self.beta: dict[Color, dict[int, Fraction]] = {Color.BLUE: {}, Color.RED: {}}
        self.events: list[PeelEvent] = []

    @property
    def X(self) -> VertexSet:
        return VertexSet.from_mask(self.alive)

    @property
    def deleted_count(self) -> int:
        return self.n - int(self.alive.sum())

    def over_threshold(self, u: int) -> bool:
        return any(
            self.alpha[c].get(u, 0) >= HALF or self.beta[c].get(u, 0) >= QUARTER for c in (Color.BLUE, Color.RED)
        )


def u_members(state: PeelState, v: int, color: Color, m: int) -> np.ndarray:
    """U^color_{<=m}(v, X) in ascending order, by direct threshold queries."""
    cand = np.flatnonzero(state.alive)
    cand = cand[cand != v]
    if cand.size == 0:
        return cand
    ok = state.oracle.degrees_at_most(cand, np.full(cand.size, v), color.flip(), m)
    return cand[ok]


def peel_step(state: PeelState, v: int, color: Color, m: int, members: np.ndarray | None = None) -> PeelEvent:
    """Apply one peeling step to ``state`` in place and return its event.

    ``members`` may pass a precomputed ascending U^color_{<=m}(v, X).
    """
    t = state.t
    if not state.alive[v]:
        raise RuntimeError(f"peel of vertex {v} outside the live pool")
    if members is None:
        members = u_members(state, v, color, m)
    if members.size < 10 * m:
        raise RuntimeError(f"peel of vertex {v} at m={m}: U-set has {members.size} < {10 * m} members")
    hat = np.asarray(members[: 10 * m], dtype=np.int64)

    red, _, params = state.coloring._fns()
    ws = np.flatnonzero(state.alive)
    ws = ws[ws != v]
    counts = K.count_through(red, params, v, hat, ws, color is Color.RED, 4 * m)
    bad = ws[counts <= 4 * m]

    state.bodies[color].append(int(v))

    alpha = state.alpha[color]
    step = Fraction(t, m)
    for u in hat.tolist():
        alpha[u] = alpha.get(u, 0) + step
    alpha_mass = step * len(hat)

    beta = state.beta[color]
    beta_mass = Fraction(0)
    if bad.size:
        db, dr = state.oracle.exact_degrees(np.full(bad.size, v), bad)
        degs = dr if color is Color.RED else db
        for w, d in zip(bad.tolist(), degs.tolist()):
            inc = beta_increment(t, d)
            beta[w] = beta.get(w, 0) + inc
            beta_mass += inc

    touched = sorted(set(hat.tolist()) | set(bad.tolist()))
    deleted = [u for u in touched if state.alive[u] and state.over_threshold(u)]
    state.alive[deleted] = False
    state.alive[v] = False

    event = PeelEvent(int(v), color, m, tuple(hat.tolist()), tuple(bad.tolist()), tuple(deleted), alpha_mass, beta_mass)
    state.events.append(event)
    return event


class _StageScanner:
    """Finds the next (v, chi) to peel in a stage, in ascending-id order.

    For each vertex it keeps a profile of the partners u whose blue or red
    pair degree with v is at most m_max (all other partners can never enter a
    U-set).  ``next_stage[v]`` is a lower bound on the first stage at which v
    could still be peeled; since the pool only shrinks, the bound stays valid
    and vertices whose profiles are too thin are skipped without queries.

    A profile is first computed only against partners whose own profile does
    not exist yet; pairs seen from the other side are handed over through
    ``pending``.  Evicting a nonempty profile turns that shortcut off for the
    rest of the run.
    """

    def __init__(self, state: PeelState, max_entries: int = 1 << 24):
        self.state = state
        n = state.n
        self.cap = state.m_max
        self.next_stage = np.zeros(n, dtype=np.int64)
        self.computed = np.zeros(n, dtype=bool)
        self.profiles: OrderedDict[int, tuple[np.ndarray, np.ndarray, np.ndarray]] = OrderedDict()
        self.entries = 0
        self.max_entries = max_entries
        self.symmetric = True
        self.pending: dict[int, list[tuple[int, int, int]]] = {}
        self._empty = (np.empty(0, np.int64), np.empty(0, np.int32), np.empty(0, np.int32))

    def _store(self, v: int, prof) -> None:
        if prof[0].size == 0:
            self.profiles[v] = self._empty
            return
        self.profiles[v] = prof
        self.entries += prof[0].size
        while self.entries > self.max_entries and len(self.profiles) > 1:
            old, oprof = self.profiles.popitem(last=False)
            if old == v:
                self.profiles[old] = oprof
                self.profiles.move_to_end(old, last=False)
                break
            if oprof[0].size:
                self.entries -= oprof[0].size
                self.symmetric = False
                self.pending.clear()

    def profile(self, v: int):
        prof = self.profiles.get(v)
        if prof is not None:
            self.profiles.move_to_end(v)
            return prof
        st = self.state
        if self.symmetric and not self.computed[v]:
            scan = np.flatnonzero(st.alive & ~self.computed)
            scan = scan[scan != v]
            us, bt, rt = self._scan(v, scan)
            back = self.pending.pop(v, None)
            if back:
                arr = np.array(back, dtype=np.int64)
                us = np.concatenate([us, arr[:, 0]])
                bt = np.concatenate([bt, arr[:, 1].astype(np.int32)])
                rt = np.concatenate([rt, arr[:, 2].astype(np.int32)])
                order = np.argsort(us, kind="stable")
                us, bt, rt = us[order], bt[order], rt[order]
            for u, b, r in zip(us.tolist(), bt.tolist(), rt.tolist()):
                if not self.computed[u]:
                    self.pending.setdefault(u, []).append((v, b, r))
            prof = (us.astype(np.int64), bt, rt)
        else:
            scan = np.flatnonzero(st.alive)
            prof = self._scan(v, scan[scan != v])
        self.computed[v] = True
        self._store(v, prof)
        return prof

    def _scan(self, v: int, us: np.ndarray):
        bt, rt = self.state.oracle.thin_profile(v, us, self.cap)
        keep = (bt >= 0) | (rt >= 0)
        return us[keep], bt[keep], rt[keep]

    def members(self, v: int, color: Color, m: int) -> np.ndarray:
        us, bt, rt = self.profile(v)
        # U^b is governed by red degree, U^r by blue degree
        vals = rt if color is Color.BLUE else bt
        ok = (vals >= 0) & (vals <= m) & self.state.alive[us]
        return us[ok]

    def _bound(self, v: int, m: int) -> int:
        us, bt, rt = self.profile(v)
        best = self.cap + 1
        alive = self.state.alive[us]
        stages = np.arange(m + 1, self.cap + 1)
        if stages.size == 0:
            return best
        for vals in (rt, bt):
            live = np.sort(vals[(vals >= 0) & alive])
            if live.size < 10 * (m + 1):
                continue
            counts = np.searchsorted(live, stages, side="right")
            hits = np.flatnonzero(counts >= 10 * stages)
            if hits.size:
                best = min(best, int(stages[hits[0]]))
        return best

    def find(self, m: int):
        st = self.state
        while True:
            cand = np.flatnonzero(st.alive & (self.next_stage <= m))
            if cand.size == 0:
                return None
            for v in cand.tolist():
                for color in (Color.BLUE, Color.RED):
                    mem = self.members(v, color, m)
                    if mem.size >= 10 * m:
                        return v, color, mem
                self.next_stage[v] = self._bound(v, m)
            return None


def run_peeling(
    coloring: TripleColoring,
    t: int,
    oracle: DegreeOracle | None = None,
    seed: int | None = None,
    profile_entries: int = 1 << 24,
) -> PeelOutcome:
    """Run every stage of the peeling procedure until a body fills or stages run out."""
    n = coloring.n
    if t < 2:
        raise ValueError("t must be at least 2")
    if n < t + comb(t, 2):
        raise ValueError(f"n={n} is too small to hold a hedgehog with t={t}")
    state = PeelState(coloring, t, oracle)
    scanner = _StageScanner(state, profile_entries)
    trace = PeelTrace(t, n, coloring.descriptor, seed, state.events)

    for m in range(2 * t, state.m_max + 1):
        state.m = m
        while True:
            hit = scanner.find(m)
            if hit is None:
                break
            v, color, mem = hit
            peel_step(state, v, color, m, mem)
            if len(state.bodies[color]) == t:
                return PeelOutcome(trace, color, tuple(state.bodies[color]))
    return PeelOutcome(trace, residual=state.X)


# ---------------------------------------------------------------------------
# pair classification and audits


@dataclass(frozen=True)
class PairClass:
    color: Color
    body: tuple[int, ...]
    good: tuple[tuple[int, int], ...]
    bad: tuple[tuple[int, int], ...]
    bad_sum: Fraction
    min_degree: int

    @property
    def bad_sum_ok(self) -> bool:
        return self.bad_sum < QUARTER


def classify_pairs(coloring: TripleColoring, trace: PeelTrace) -> PairClass:
    """Split the finished body's pairs into good and bad by the later vertex's bad-set membership."""
    color = trace.finished_color()
    if color is None:
        raise ValueError("trace did not finish; no body to classify")
    events = [e for e in trace.events if e.color is color][: trace.t]
    body = tuple(e.vertex for e in events)
    oracle = DegreeOracle(coloring)
    good, bad = [], []
    bad_sum = Fraction(0)
    min_deg = None
    for i, ei in enumerate(events):
        bset = set(ei.bad)
        for ej in events[i + 1 :]:
            pair = (ei.vertex, ej.vertex)
            d = oracle.pair_degree(ei.vertex, ej.vertex, color)
            min_deg = d if min_deg is None else min(min_deg, d)
            if ej.vertex in bset:
                bad.append(pair)
                bad_sum += Fraction(1, d) if d else Fraction(10**18)
            else:
                good.append(pair)
    return PairClass(color, body, tuple(good), tuple(bad), bad_sum, min_deg if min_deg is not None else 0)


@dataclass(frozen=True)
class Violation:
    check: str
    event: int | None
    detail: str

    def __str__(self) -> str:
        where = "" if self.event is None else f" event {self.event}"
        return f"{self.check}{where}: {self.detail}"


def _u_counts(coloring: TripleColoring, oracle: DegreeOracle, v: int, alive: np.ndarray, cap: int):
    """Sorted red and blue thin-degree values of v's live partners (<= cap)."""
    us = np.flatnonzero(alive)
    us = us[us != v]
    bt, rt = oracle.thin_profile(v, us, cap)
    return np.sort(rt[rt >= 0]), np.sort(bt[bt >= 0])


def _check_stage_bounds(coloring, oracle, t, alive, m_done, sample, out, event_idx):
    stages = np.arange(2 * t, m_done + 1)
    if stages.size == 0:
        return
    for v in sample(alive):
        rvals, bvals = _u_counts(coloring, oracle, v, alive, m_done)
        for color, vals in ((Color.BLUE, rvals), (Color.RED, bvals)):
            counts = np.searchsorted(vals, stages, side="right")
            over = np.flatnonzero(counts >= 10 * stages)
            if over.size:
                mm = int(stages[over[0]])
                out.append(
                    Violation(
                        "alg-1", event_idx, f"after stage {m_done}: |U^{color}_<={mm}({v}, X)| = {counts[over[0]]} >= {10 * mm}"
                    )
                )


def audit_trace(
    coloring: TripleColoring,
    t: int,
    trace: PeelTrace,
    exhaustive_limit: int = 400,
    sample_size: int = 48,
    seed: int = 0,
) -> list[Violation]:
    """Replay a peeling trace against the coloring and check every ledger bound.

    Post-stage U-bounds are checked for every live vertex when n is at most
    ``exhaustive_limit`` and for a seeded sample of live vertices otherwise.
    """
    n = coloring.n
    if trace.n != n or trace.t != t:
        raise ValueError(f"trace is for (t={trace.t}, n={trace.n}), not (t={t}, n={n})")
    oracle = DegreeOracle(coloring)
    red, _, params = coloring._fns()
    mmax = m_max(t)
    rng = np.random.default_rng(seed)
    out: list[Violation] = []

    def sample(alive: np.ndarray) -> list[int]:
        live = np.flatnonzero(alive)
        if n <= exhaustive_limit or live.size <= sample_size:
            return live.tolist()
        return np.sort(rng.choice(live, size=sample_size, replace=False)).tolist()

    alive = np.ones(n, dtype=bool)
    alpha = {Color.BLUE: {}, Color.RED: {}}
    beta = {Color.BLUE: {}, Color.RED: {}}
    bodies: dict[Color, list[int]] = {Color.BLUE: [], Color.RED: []}
    prev_m = 2 * t
    alpha_total = {Color.BLUE: Fraction(0), Color.RED: Fraction(0)}
    beta_total = {Color.BLUE: Fraction(0), Color.RED: Fraction(0)}
    b_bound = Fraction(beta_mass_bound(t))

    for idx, e in enumerate(trace.events):
        v, color, m = e.vertex, e.color, e.m
        if not 2 * t <= m <= mmax or m < prev_m:
            out.append(Violation("order", idx, f"stage {m} out of order or range"))
        if m > prev_m:
            _check_stage_bounds(coloring, oracle, t, alive, m - 1, sample, out, idx)
        prev_m = max(prev_m, m)
        if not 0 <= v < n or not alive[v]:
            out.append(Violation("pool", idx, f"peeled vertex {v} not in X"))
            continue
        if any(len(b) >= t for b in bodies.values()):
            out.append(Violation("stop", idx, "peel after a body already had t vertices"))

        hat = np.array(e.hat_u, dtype=np.int64)
        if hat.size != 10 * m:
            out.append(Violation("def", idx, f"|hat U| = {hat.size} != 10m = {10 * m}"))
        if hat.size:
            if len(set(e.hat_u)) != hat.size or np.any(hat < 0) or np.any(hat >= n) or v in set(e.hat_u):
                out.append(Violation("def", idx, "hat U has repeated, foreign or out-of-range vertices"))
                hat = np.unique(hat[(hat >= 0) & (hat < n) & (hat != v)])
            in_x = alive[hat]
            thin = oracle.degrees_at_most(hat, np.full(hat.size, v), color.flip(), m)
            if not np.all(in_x & thin):
                out.append(Violation("def", idx, "hat U not contained in U-set"))

        ws = np.flatnonzero(alive)
        ws = ws[ws != v]
        counts = K.count_through(red, params, v, hat, ws, color is Color.RED, 4 * m)
        bad = ws[counts <= 4 * m]
        if tuple(bad.tolist()) != e.bad:
            out.append(Violation("replay", idx, "bad set differs from recomputation"))
        if len(e.bad) > 2 * m or bad.size > 2 * m:
            out.append(Violation("alg-2", idx, f"|B| = {max(len(e.bad), bad.size)} > 2m = {2 * m}"))
        wv = np.arange(n)
        wv = wv[wv != v]
        cv = K.count_through(red, params, v, hat, wv, color is Color.RED, 4 * m)
        nb_v = int((cv <= 4 * m).sum())
        if nb_v > 2 * m:
            out.append(Violation("alg-2[V]", idx, f"|B over V| = {nb_v} > 2m = {2 * m}"))

        bodies[color].append(v)
        step = Fraction(t, m)
        if step > HALF:
            out.append(Violation("increment", idx, f"alpha increment {step} > 1/2"))
        a_mass = step * hat.size
        for u in hat.tolist():
            alpha[color][u] = alpha[color].get(u, 0) + step
        if a_mass != 10 * t or e.alpha_mass != a_mass:
            out.append(Violation("alg-7", idx, f"alpha mass {a_mass} (recorded {e.alpha_mass}) != 10t = {10 * t}"))
        alpha_total[color] += a_mass

        b_mass = Fraction(0)
        if bad.size:
            db, dr = oracle.exact_degrees(np.full(bad.size, v), bad)
            degs = dr if color is Color.RED else db
            for w, d in zip(bad.tolist(), degs.tolist()):
                inc = beta_increment(t, d)
                if inc > QUARTER:
                    out.append(Violation("increment", idx, f"beta increment {inc} > 1/4"))
                beta[color][w] = beta[color].get(w, 0) + inc
                b_mass += inc
        if e.beta_mass != b_mass:
            out.append(Violation("replay", idx, f"beta mass {e.beta_mass} recorded, {b_mass} recomputed"))
        if not b_mass < b_bound:
            out.append(Violation("alg-3", idx, f"beta mass {b_mass} >= 20 t ln t = {float(b_bound):.3f}"))
        beta_total[color] += b_mass

        touched = sorted(set(hat.tolist()) | set(bad.tolist()))
        deleted = [
            u
            for u in touched
            if alive[u]
            and any(alpha[c].get(u, 0) >= HALF or beta[c].get(u, 0) >= QUARTER for c in (Color.BLUE, Color.RED))
        ]
        if tuple(deleted) != e.deleted:
            out.append(Violation("replay", idx, "threshold deletions differ from recomputation"))
        alive[deleted] = False
        alive[v] = False

    # ledger conservation and deletion counts
    for c in (Color.BLUE, Color.RED):
        if sum(alpha[c].values(), Fraction(0)) != 10 * t * len(bodies[c]):
            out.append(Violation("alg-7", None, f"sum alpha^{c} != 10t |S^{c}|"))
        if len(bodies[c]) and not sum(beta[c].values(), Fraction(0)) < b_bound * len(bodies[c]):
            out.append(Violation("alg-3", None, f"sum beta^{c} >= 20 t ln t |S^{c}|"))
    deleted_total = n - int(alive.sum())
    fine_bound = 2 * t + 2 * (alpha_total[Color.BLUE] + alpha_total[Color.RED]) + 4 * (
        beta_total[Color.BLUE] + beta_total[Color.RED]
    )
    if trace.events and not deleted_total < fine_bound:
        out.append(Violation("alg-8", None, f"{deleted_total} deletions, not below 2t + 2 sum alpha + 4 sum beta = {fine_bound}"))
    if deleted_total > deletion_bound(t):
        out.append(Violation("alg-8", None, f"{deleted_total} deletions > 200 t^2 ln t = {deletion_bound(t):.1f}"))

    # same-color peeled pairs are heavy in their color
    for c, body in bodies.items():
        if len(body) < 2:
            continue
        us, vs = zip(*[(a, b) for i, a in enumerate(body) for b in body[i + 1 :]])
        light = oracle.degrees_at_most(np.array(us), np.array(vs), c, 4 * t - 1)
        for a, b, flag in zip(us, vs, light.tolist()):
            if flag:
                out.append(Violation("alg-4", None, f"d^{c}({a},{b}) < 4t"))

    finished = any(len(b) >= t for b in bodies.values())
    if not finished:
        _check_stage_bounds(coloring, oracle, t, alive, mmax, sample, out, None)
        if n >= deletion_bound(t) + 400 * t * t and alive.sum() < 400 * t * t:
            out.append(Violation("residual", None, f"stuck with |X| = {int(alive.sum())} < 400 t^2"))
    return out
