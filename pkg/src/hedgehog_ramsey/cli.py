"""Command-line interface: gen, solve, verify, audit, oracle, sweep.

Exit codes: 0 success, 1 not found, 2 invariant breach, 3 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .hedgehog import dumps_certificate, from_certificate, verify_embedding
from .hypercolor import Color, GnpGraph, SimpleColoring, parse_descriptor, write_coloring_file, write_graph
from .oracle import BudgetExceeded, exhaustive_find, min_coloring_search
from .peel import PeelTrace, audit_trace
from .pipeline import MODES, ConfigError, records_to_csv, solve, sweep

EXIT_OK, EXIT_NOT_FOUND, EXIT_CRITICAL, EXIT_USAGE = 0, 1, 2, 3
log = logging.getLogger("hedgehog_ramsey")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _coloring(args):
    try:
        return parse_descriptor(args.coloring, args.n)
    except (ValueError, OSError) as exc:
        raise UsageError(str(exc)) from exc


def cmd_gen(args) -> int:
    kind = args.coloring.partition(":")[0]
    if not args.out:
        raise UsageError("gen needs --out")
    col = _coloring(args)
    if kind == "gnp" and isinstance(col, SimpleColoring) and isinstance(col.graph, GnpGraph):
        write_graph(col.graph, args.out)
    else:
        try:
            write_coloring_file(col, args.out)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
    return EXIT_OK


def cmd_solve(args) -> int:
    col = _coloring(args)
    try:
        res = solve(col, args.t, seed=args.seed, max_retries=args.max_retries, mode=args.mode, audit=args.audit)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if args.trace and res.peel is not None:
        Path(args.trace).write_text(res.peel.trace.dumps())
    for msg in res.critical:
        log.error("CRITICAL: %s", msg)
    for msg in res.audit or []:
        log.error("audit violation: %s", msg)
    cert = res.certificate(args.coloring, args.seed, args.trace)
    if cert is not None:
        _emit(dumps_certificate(cert), args.out)
    else:
        log.warning("no hedgehog found (path %s, outcome %s)", res.path, res.outcome)
    if res.audit:
        return EXIT_CRITICAL
    return res.exit_code


def cmd_verify(args) -> int:
    try:
        cert = json.loads(Path(args.cert).read_text())
        emb = from_certificate(cert)
    except (OSError, ValueError) as exc:
        raise UsageError(f"unparseable certificate: {exc}") from exc
    desc = args.coloring or cert.get("coloring")
    if not desc:
        raise UsageError("certificate names no coloring; pass --coloring")
    try:
        col = parse_descriptor(desc, int(cert["n"]))
    except (ValueError, OSError) as exc:
        raise UsageError(f"cannot reconstruct coloring: {exc}") from exc
    problems = verify_embedding(col, emb, int(cert["t"]))
    if problems:
        for p in problems:
            print(f"FAIL: {p}")
        return EXIT_NOT_FOUND
    print(f"PASS: {emb.color} hedgehog H_{emb.t} on n={col.n}")
    return EXIT_OK


def cmd_audit(args) -> int:
    try:
        trace = PeelTrace.loads(Path(args.trace).read_text())
    except (OSError, ValueError) as exc:
        raise UsageError(f"unreadable trace: {exc}") from exc
    args.n = args.n or trace.n
    if not args.coloring:
        if not trace.coloring:
            raise UsageError("trace names no coloring; pass --coloring")
        args.coloring = trace.coloring
    col = _coloring(args)
    try:
        found = audit_trace(col, trace.t, trace, seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    for v in found:
        print(f"VIOLATION {v}")
    print(f"{len(trace.events)} events, {len(found)} violations")
    return EXIT_CRITICAL if found else EXIT_OK


def cmd_oracle(args) -> int:
    try:
        if args.min_search:
            w = min_coloring_search(args.n, args.t)
            if w is None:
                print(f"every 2-coloring of K_{args.n}^(3) contains a monochromatic H_{args.t}")
                return EXIT_NOT_FOUND
            if args.out:
                write_coloring_file(w, args.out)
            print(f"witness coloring on n={args.n} with no monochromatic H_{args.t}")
            return EXIT_OK
        col = _coloring(args)
        found = {c: exhaustive_find(col, args.t, c) for c in (Color.RED, Color.BLUE)}
    except BudgetExceeded as exc:
        raise UsageError(str(exc)) from exc
    for c, emb in found.items():
        print(f"{c}: {'found body ' + str(list(emb.body)) if emb else 'none'}")
    return EXIT_OK if any(found.values()) else EXIT_NOT_FOUND


def cmd_sweep(args) -> int:
    try:
        text = Path(args.config).read_text()
        records = sweep(text, threads=args.threads)
    except (OSError, ConfigError) as exc:
        raise UsageError(str(exc)) from exc
    _emit(records_to_csv(records), args.out)
    if any(r.outcome == "critical" or r.audit.startswith("fail") for r in records):
        return EXIT_CRITICAL
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hedgehog", description="Find and certify monochromatic hedgehogs in 2-colored triple systems.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, need_t=True):
        sp.add_argument("--coloring", help="coloring descriptor, e.g. random:p=0.5:seed=1")
        sp.add_argument("--n", type=int, help="vertex count for generated families")
        if need_t:
            sp.add_argument("--t", type=int, required=True)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out")

    sp = sub.add_parser("gen", help="write a generated coloring or graph to a file")
    common(sp, need_t=False)
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("solve", help="find a monochromatic hedgehog and print its certificate")
    common(sp)
    sp.add_argument("--mode", choices=MODES, default="auto")
    sp.add_argument("--max-retries", type=int, default=10)
    sp.add_argument("--audit", action="store_true")
    sp.add_argument("--trace", help="write the peeling trace (JSONL) here")
    sp.add_argument("--threads", type=int, default=1)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("verify", help="check a certificate against its coloring")
    sp.add_argument("cert")
    sp.add_argument("--coloring")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("audit", help="replay a peeling trace and check the ledger bounds")
    sp.add_argument("--trace", required=True)
    sp.add_argument("--coloring")
    sp.add_argument("--n", type=int)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_audit)

    sp = sub.add_parser("oracle", help="exhaustive search on small instances")
    common(sp)
    sp.add_argument("--min-search", action="store_true", help="search all colorings of K_n^(3)")
    sp.set_defaults(func=cmd_oracle)

    sp = sub.add_parser("sweep", help="run a YAML sweep config and write CSV")
    sp.add_argument("--config", required=True)
    sp.add_argument("--out")
    sp.add_argument("--threads", type=int, default=1)
    sp.set_defaults(func=cmd_sweep)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if args.command in ("gen", "solve", "oracle") and not getattr(args, "min_search", False) and not args.coloring:
        print("error: --coloring is required", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
