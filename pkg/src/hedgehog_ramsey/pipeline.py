"""End-to-end solver and experiment sweeps."""

from __future__ import annotations

import csv
import io
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import comb
from pathlib import Path

import numpy as np
import yaml

from .balanced import BalancedInvariantError, BalancedRunStats, find_red_hedgehog_balanced
from .hedgehog import DeficiencyWitness, HedgehogEmbedding, find_hedgehog, to_certificate, verify_embedding
from .hypercolor import Color, RestrictedColoring, SimpleColoring, TripleColoring, parse_descriptor, restrict
from .oracle import exhaustive_find
from .peel import PeelOutcome, audit_trace, classify_pairs, run_peeling, theorem_threshold

MODES = ("auto", "peel", "balanced", "simple", "oracle")
CSV_COLUMNS = ["family", "seed", "t", "n", "path", "outcome", "peels", "deleted", "retries", "millis", "audit"]
BALANCED_C = 10


def guaranteed(t: int, n: int) -> bool:
    """Whether (t, n) lies in the range where a hedgehog must be found."""
    return t >= 10 and n >= 200 * t * t * math.log(t) + 400 * t * t


@dataclass
class SolveResult:
    t: int
    n: int
    embedding: HedgehogEmbedding | None
    path: str
    outcome: str  # found | not-found | critical
    critical: list[str] = field(default_factory=list)
    peel: PeelOutcome | None = None
    balanced: BalancedRunStats | None = None
    witness: DeficiencyWitness | None = None
    audit: list[str] | None = None

    @property
    def exit_code(self) -> int:
        if self.critical:
            return 2
        return 0 if self.embedding is not None else 1

    def certificate(self, descriptor: str | None, seed: int | None, trace_path: str | None = None) -> dict | None:
        if self.embedding is None:
            return None
        prov = {"path": self.path, "trace": trace_path}
        if self.peel is not None:
            prov["peels"] = len(self.peel.trace.events)
            prov["deleted"] = self.n - len(self.peel.trace.residual())
        extra = {"provenance": prov}
        if self.balanced is not None:
            extra.update(self.balanced.to_json())
        return to_certificate(self.embedding, self.n, descriptor, seed, **extra)


def _finish(res: SolveResult, coloring: TripleColoring) -> SolveResult:
    if res.embedding is not None:
        problems = verify_embedding(coloring, res.embedding, res.t)
        if problems:
            res.critical.append(f"certificate fails verification: {problems}")
            res.embedding = None
    if res.critical:
        res.outcome = "critical"
    else:
        res.outcome = "found" if res.embedding is not None else "not-found"
    return res


def _balanced_on(coloring: TripleColoring, t: int, seed: int, max_retries: int, res: SolveResult, base=None):
    sub = coloring if base is None else base
    try:
        emb, stats = find_red_hedgehog_balanced(sub, t, max_retries, seed)
    except BalancedInvariantError as exc:
        res.critical.append(str(exc))
        return
    res.balanced = stats
    if emb is not None and isinstance(sub, RestrictedColoring):
        emb = emb.relabel(sub.vertex_map)
    res.embedding = emb


def solve(
    coloring: TripleColoring,
    t: int,
    seed: int = 0,
    max_retries: int = 10,
    mode: str = "auto",
    audit: bool = False,
) -> SolveResult:
    """Peel, then match on a finished body or fall back to balanced sampling on the residual."""
    n = coloring.n
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if t < 2:
        raise ValueError("t must be at least 2")
    res = SolveResult(t, n, None, mode, "pending")
    if t + comb(t, 2) > n:
        res.path = "does-not-fit"
        return _finish(res, coloring)

    if mode == "simple":
        from .simple import find_hedgehog_simple

        if not isinstance(coloring, SimpleColoring):
            raise ValueError("simple mode needs a graph-induced coloring")
        res.embedding = find_hedgehog_simple(coloring.graph, t)
        return _finish(res, coloring)
    if mode == "oracle":
        res.embedding = exhaustive_find(coloring, t, Color.RED) or exhaustive_find(coloring, t, Color.BLUE)
        return _finish(res, coloring)
    if mode == "balanced":
        if n >= 4 * t:
            _balanced_on(coloring, t, seed, max_retries, res)
        return _finish(res, coloring)

    peel = run_peeling(coloring, t, seed=seed)
    res.peel = peel
    if audit:
        res.audit = [str(v) for v in audit_trace(coloring, t, peel.trace, seed=seed)]
    if peel.finished:
        res.path = f"finished-{'blue' if peel.color is Color.BLUE else 'red'}"
        found = find_hedgehog(coloring, peel.color, peel.body)
        if isinstance(found, DeficiencyWitness):
            res.witness = found
            res.critical.append(f"finished body {peel.body} has a deficiency witness of {len(found.pairs)} pairs")
        else:
            res.embedding = found
        if audit:
            pc = classify_pairs(coloring, peel.trace)
            if not pc.bad_sum_ok:
                res.audit.append(f"alg-5: bad-pair sum {pc.bad_sum} >= 1/4")
            if pc.min_degree < 4 * t:
                res.audit.append(f"alg-4: body pair degree {pc.min_degree} < 4t")
        return _finish(res, coloring)

    res.path = "stuck-balanced"
    if mode == "auto":
        X = peel.residual
        if len(X) >= max(3, 4 * t):
            _balanced_on(coloring, t, seed, max_retries, res, base=restrict(coloring, X))
    if res.embedding is None and guaranteed(t, n):
        res.critical.append(f"no hedgehog at t={t}, n={n} >= {theorem_threshold(t)}")
    return _finish(res, coloring)


# ---------------------------------------------------------------------------
# sweeps


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunSpec:
    family: str
    seed: int
    t: int
    n: int


@dataclass
class ExperimentRecord:
    family: str
    seed: int
    t: int
    n: int
    path: str
    outcome: str
    peels: int
    deleted: int
    retries: int
    millis: int
    audit: str
    certificate: dict | None = None

    def row(self) -> list:
        return [getattr(self, c) for c in CSV_COLUMNS]


def family_descriptor(family: str, seed: int) -> str:
    """Seeded families get the run's seed appended unless they carry one."""
    kind = family.partition(":")[0]
    if kind in ("random", "gnp") and "seed=" not in family:
        return f"{family}:seed={seed}"
    return family


def _key_line(node, key: str) -> int | None:
    if isinstance(node, yaml.MappingNode):
        for k, _ in node.value:
            if k.value == key:
                return k.start_mark.line + 1
    return None


def parse_sweep_config(text: str) -> tuple[list[RunSpec], dict]:
    """Expand a YAML sweep config into run specs plus shared options.

    Keys: ``families`` (descriptors), ``seeds``, ``grid`` (list of {t, n}),
    optional ``mode``, ``max_retries``, ``audit``.
    """
    try:
        node = yaml.compose(text)
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"config is not valid YAML: {exc}") from exc
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError("line 1: config must be a mapping")

    def where(key):
        line = _key_line(node, key)
        return f"line {line}: " if line else ""

    known = {"families", "seeds", "grid", "mode", "max_retries", "audit"}
    for key in data:
        if key not in known:
            raise ConfigError(f"{where(key)}unknown field {key!r}")
    fams = data.get("families", [])
    seeds = data.get("seeds", [0])
    grid = data.get("grid", [])
    if not isinstance(fams, list) or not all(isinstance(f, str) for f in fams):
        raise ConfigError(f"{where('families')}field 'families' must be a list of descriptor strings")
    if not isinstance(seeds, list) or not all(isinstance(s, int) and s >= 0 for s in seeds):
        raise ConfigError(f"{where('seeds')}field 'seeds' must be a list of nonnegative integers")
    if not isinstance(grid, list):
        raise ConfigError(f"{where('grid')}field 'grid' must be a list of {{t, n}} entries")
    cells = []
    for i, cell in enumerate(grid):
        if not isinstance(cell, dict) or set(cell) != {"t", "n"}:
            raise ConfigError(f"{where('grid')}grid[{i}] must have exactly the fields t and n")
        if not all(isinstance(cell[k], int) for k in ("t", "n")) or cell["t"] < 2 or cell["n"] < 1:
            raise ConfigError(f"{where('grid')}grid[{i}]: t must be an integer >= 2 and n a positive integer")
        cells.append((cell["t"], cell["n"]))
    opts = {
        "mode": data.get("mode", "auto"),
        "max_retries": data.get("max_retries", 10),
        "audit": bool(data.get("audit", False)),
    }
    if opts["mode"] not in MODES:
        raise ConfigError(f"{where('mode')}field 'mode' must be one of {', '.join(MODES)}")
    if not isinstance(opts["max_retries"], int) or opts["max_retries"] < 1:
        raise ConfigError(f"{where('max_retries')}field 'max_retries' must be a positive integer")
    for fam in fams:
        kind = fam.partition(":")[0]
        if kind not in ("allred", "allblue", "random", "gnp", "simple", "file"):
            raise ConfigError(f"{where('families')}unknown family {fam!r}")
    specs = [RunSpec(f, s, t, n) for f in fams for s in seeds for (t, n) in cells]
    return specs, opts


def run_record(spec: RunSpec, mode: str = "auto", max_retries: int = 10, audit: bool = False) -> ExperimentRecord:
    desc = family_descriptor(spec.family, spec.seed)
    coloring = parse_descriptor(desc, spec.n)
    start = time.perf_counter()
    res = solve(coloring, spec.t, seed=spec.seed, max_retries=max_retries, mode=mode, audit=audit)
    millis = int(round((time.perf_counter() - start) * 1000))
    peels = len(res.peel.trace.events) if res.peel else 0
    deleted = spec.n - len(res.peel.trace.residual()) if res.peel else 0
    retries = res.balanced.retries if res.balanced else 0
    if res.audit is None:
        audit_cell = "skipped"
    else:
        audit_cell = "pass" if not res.audit else f"fail:{len(res.audit)}"
    return ExperimentRecord(
        spec.family, spec.seed, spec.t, spec.n, res.path, res.outcome, peels, deleted, retries, millis, audit_cell,
        res.certificate(desc, spec.seed),
    )


def sweep(config: str | dict, threads: int = 1) -> list[ExperimentRecord]:
    """Run every cell of a sweep config; records come back in config order."""
    text = config if isinstance(config, str) else yaml.safe_dump(config)
    specs, opts = parse_sweep_config(text)
    if threads <= 1:
        return [run_record(s, **opts) for s in specs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda s: run_record(s, **opts), specs))


def records_to_csv(records: list[ExperimentRecord], with_timing: bool = True) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    cols = CSV_COLUMNS if with_timing else [c for c in CSV_COLUMNS if c != "millis"]
    w.writerow(cols)
    for r in records:
        row = dict(zip(CSV_COLUMNS, r.row()))
        w.writerow([row[c] for c in cols])
    return buf.getvalue()


def write_csv(records: list[ExperimentRecord], path: str | Path) -> None:
    Path(path).write_text(records_to_csv(records))
