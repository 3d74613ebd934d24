"""Command-line entry point: ``coopmsr <subcommand>``.

Exit codes: 0 success, 1 a check failed, 2 bad usage, 3 guard or parameter
violation, 4 I/O or shard format failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .cluster import Cluster, NodeFailed, ShardFormatError, ingest, repair_report
from .msrcode import make_params, verify_mds
from .msrcode.params import repair_bounds
from .pairmap import build as build_pairmap

EXIT_FAIL, EXIT_USAGE, EXIT_GUARD, EXIT_IO = 1, 2, 3, 4
GRID_NAMES = ("small", "full")


class UsageError(Exception):
    pass


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2, sort_keys=False) + "\n")


def _nodes(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"bad node list {text!r}") from exc


def cmd_params(args) -> int:
    r = args.n - args.k
    if args.k < 1 or r < 2:
        raise ValueError(f"need k >= 1 and n - k >= 2, got n={args.n}, k={args.k}")
    pm = build_pairmap(args.n, r)
    ell = r ** pm.m
    omega = {
        str(j): {"0": sorted(pm.omega(j)[0]), "1": sorted(pm.omega(j)[1])}
        for j in range(1, args.n + 1)
    }
    _emit({
        "n": args.n, "k": args.k, "r": r, "g": pm.g, "m": pm.m, "ell": ell,
        "prime": args.prime,
        "bounds": repair_bounds(args.n, args.k, ell),
        "pi": pm.table(),
        "omega": omega,
    })
    return 0


def cmd_encode(args) -> int:
    params = make_params(args.n, args.k, args.prime)
    data = Path(args.input).read_bytes()
    cluster = ingest(params, data)
    cluster.save(args.out)
    print(f"wrote {params.n} shards, {cluster.stripes} stripe(s) of ell={params.ell}",
          file=sys.stderr)
    _emit({"n": params.n, "k": params.k, "ell": params.ell, "stripes": cluster.stripes,
           "bytes": len(data), "out": str(args.out)})
    return 0


def cmd_decode(args) -> int:
    cluster = Cluster.load(args.shards)
    available = _nodes(args.from_) if args.from_ else None
    data = cluster.decode(available)
    Path(args.out).write_bytes(data)
    _emit({"bytes": len(data), "from": available or
           [j for j in range(1, cluster.params.n + 1) if j not in cluster.failed]})
    return 0


def cmd_repair(args) -> int:
    pair = _nodes(args.fail)
    if len(pair) != 2:
        raise UsageError("--fail takes exactly two nodes, e.g. 1,2")
    if pair[0] == pair[1]:
        raise UsageError("--fail needs two distinct nodes")
    cluster = Cluster.load(args.shards)
    for j in pair:
        cluster._check_node(j)
    # shards already missing on disk count as failed; present ones are dropped
    before = {j: cluster.shard(j).digest() for j in pair if cluster.nodes[j] is not None}
    for j in before:
        cluster.nodes[j] = None
    cluster, transcript = cluster.repair()
    report = repair_report(cluster, transcript)
    match = all(cluster.shard(j).digest() == h for j, h in before.items())
    report["matches_previous"] = match if before else None
    cluster.save(args.shards)
    if args.report:
        Path(args.report).write_text(json.dumps(report, indent=2) + "\n")
    if args.ledger:
        cluster.export_ledger(args.ledger)
    print(f"repaired {tuple(pair)}: gamma={report['gamma']} (bound {report['bound_gamma']}), "
          f"gamma_a={report['gamma_a']} (bound {report['bound_gamma_a']})", file=sys.stderr)
    _emit(report)
    return 0 if report["optimal"] and match else EXIT_FAIL


def cmd_verify_mds(args) -> int:
    params = make_params(args.n, args.k, args.prime)
    verdict = verify_mds(params)
    _emit({"n": params.n, "k": params.k, "ell": params.ell, **verdict.to_dict()})
    return 0 if verdict.ok else EXIT_FAIL


def cmd_selftest(args) -> int:
    from .suites import block_suite, repair_suite

    results = []
    if args.blocks:
        results += block_suite(args.seed)
    results += repair_suite(args.grid, args.seed)
    for row in results:
        label = " ".join(f"{k}={v}" for k, v in row.items() if k != "ok")
        print(f"{'PASS' if row['ok'] else 'FAIL'}  {label}", file=sys.stderr)
    ok = all(row["ok"] for row in results)
    _emit({"ok": ok, "results": results})
    return 0 if ok else EXIT_FAIL


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="coopmsr", description="Cooperative MSR codes for two node failures.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def code_flags(p, need=True):
        p.add_argument("--n", type=int, required=need)
        p.add_argument("--k", type=int, required=need)
        p.add_argument("--prime", type=int, default=65537)

    p = sub.add_parser("params", help="print code parameters, pair map and bounds")
    code_flags(p)
    p.set_defaults(func=cmd_params)

    p = sub.add_parser("encode", help="encode a file into n shard files")
    code_flags(p)
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="rebuild a file from any k shards")
    p.add_argument("--shards", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--from", dest="from_", default=None)
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("repair", help="cooperatively repair two shards")
    p.add_argument("--shards", required=True)
    p.add_argument("--fail", required=True)
    p.add_argument("--report", default=None)
    p.add_argument("--ledger", default=None, help="write the message ledger as JSON lines")
    p.set_defaults(func=cmd_repair)

    p = sub.add_parser("verify-mds", help="exact check of every r-subset of column blocks")
    code_flags(p)
    p.set_defaults(func=cmd_verify_mds)

    p = sub.add_parser("selftest", help="run the built-in check suites")
    p.add_argument("--blocks", action="store_true")
    p.add_argument("--grid", choices=GRID_NAMES, default="small")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_selftest)
    return ap


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ShardFormatError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, OverflowError, NodeFailed) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GUARD


def main() -> None:
    sys.exit(run())
