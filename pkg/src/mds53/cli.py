"""
Command-line entry point: `python -m mds53 <verb> ...`

Verbs:
- encode        split a file over a fresh 5-node cluster directory
- reconstruct   rebuild the file from any three healthy nodes
- fail          simulate the loss of one node
- repair        rebuild one node from one symbol per helper and stripe
- verify        census + MDS + repair cross-checks over a small field
- search-params list every valid parameter tuple of a field
- show-plan     print the repair plan of one node

Exit codes: 0 success, 1 bad usage, 2 data or verification failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Sequence

import numpy as np
import pandas as pd

from mds53 import config
from mds53.codec import Message, all_subsets, decode, encode, segments_equal
from mds53.construction import (
    ALL_NODES,
    CodeParams,
    canonical_params,
    make_instance,
    structural_identity,
)
from mds53.errors import FieldError, InvalidParamsError, MDSError, RepairError, UsageError
from mds53.galois import field_by_name
from mds53.oracle import (
    MAX_CENSUS_ORDER,
    all_scalar_messages,
    brute_force_mds,
    brute_force_repair_search,
    enumerate_valid_params,
)
from mds53.repair import (
    RepairPlan,
    execute_repair,
    helper_symbol,
    make_repair_plan,
    verify_alignment,
)
from mds53.store import (
    encode_file,
    fail_node,
    open_cluster,
    reconstruct_file,
    repair_node,
)

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FAILURE = 2

# exhaustive checks run the packed-block code path on one element per byte
EXHAUSTIVE_ORDERS = (4,)
SAMPLED_MESSAGES = 256


class _ArgParser(argparse.ArgumentParser):
    def error(self, message: str):  # type: ignore[override]
        raise UsageError(message)


# Helpers
def _node_list(text: str) -> tuple[int, ...]:
    try:
        nodes = tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated node ids, got {text!r}") from None
    if len(nodes) != 3 or len(set(nodes)) != 3 or any(n not in ALL_NODES for n in nodes):
        raise argparse.ArgumentTypeError(f"expected three distinct nodes in 1..5, got {text!r}")
    return nodes


def _cluster_dir(value: str | None) -> Path:
    if value:
        return Path(value)
    default = config.default_cluster_dir()
    if default is None:
        raise UsageError("no cluster directory: pass --dir or set MDS53_DIR")
    return default


def _field(name: str):
    try:
        return field_by_name(name)
    except FieldError as exc:
        raise UsageError(str(exc)) from exc


def _params(text: str | None) -> CodeParams:
    if not text:
        return canonical_params()
    try:
        return CodeParams.parse(text)
    except (InvalidParamsError, FieldError) as exc:
        raise UsageError(str(exc)) from exc


def _emit(args: argparse.Namespace, summary: dict[str, Any], lines: list[str]) -> None:
    if args.json:
        print(json.dumps(summary, indent=2, default=str))
    else:
        print("\n".join(lines))


# Verbs
def cmd_encode(args: argparse.Namespace) -> int:
    directory = _cluster_dir(args.out_dir)
    if args.symbol_size is None:
        try:
            symbol_size = config.default_symbol_size()
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
    else:
        symbol_size = args.symbol_size
    if symbol_size < 1:
        raise UsageError(f"--symbol-size must be positive, got {symbol_size}")
    params = _params(args.params)
    source = Path(args.input)
    if not source.is_file():
        raise UsageError(f"input file {source} not found")

    cluster = encode_file(source.read_bytes(), symbol_size, make_instance(params), directory)
    layout = cluster.layout
    summary = {
        "verb": "encode",
        "directory": str(directory),
        "params": params.serialize(),
        "original_length": layout.original_length,
        "symbol_size": layout.symbol_size,
        "stripe_count": layout.stripe_count,
        "node_bytes": layout.node_payload_bytes,
    }
    _emit(args, summary, [
        f"✅ Encoded {layout.original_length} bytes into {directory}",
        f"   {layout.stripe_count} stripe(s) x {layout.symbol_size}-byte symbols, "
        f"{layout.node_payload_bytes} payload bytes per node",
    ])
    return EXIT_OK


def cmd_reconstruct(args: argparse.Namespace) -> int:
    directory = _cluster_dir(args.dir)
    cluster = open_cluster(directory)
    data = reconstruct_file(cluster, args.nodes)
    Path(args.out).write_bytes(data)
    used = args.nodes or tuple(cluster.healthy_nodes()[:3])
    summary = {"verb": "reconstruct", "nodes": list(used), "bytes": len(data), "out": args.out}
    _emit(args, summary, [f"✅ Rebuilt {len(data)} bytes from nodes {used} -> {args.out}"])
    return EXIT_OK


def cmd_fail(args: argparse.Namespace) -> int:
    cluster = open_cluster(_cluster_dir(args.dir))
    fail_node(cluster, args.node)
    summary = {"verb": "fail", "node": args.node, "failed": cluster.failed_nodes()}
    _emit(args, summary, [f"⚠️ Node {args.node} is now failed (down: {cluster.failed_nodes()})"])
    return EXIT_OK


def cmd_repair(args: argparse.Namespace) -> int:
    plan = None
    if args.plan:
        plan_path = Path(args.plan)
        if not plan_path.is_file():
            raise UsageError(f"plan file {plan_path} not found")
        plan = RepairPlan.from_manifest(plan_path.read_text())
    cluster = open_cluster(_cluster_dir(args.dir))
    report = repair_node(cluster, args.node, plan)
    summary = {
        "verb": "repair",
        "node": report.node_id,
        "stripes": report.stripe_count,
        "per_helper_bytes": report.per_helper,
        "downloaded_bytes": report.downloaded_bytes,
        "full_decode_bytes": report.naive_bytes,
        "ratio": round(report.ratio, 4),
    }
    lines = [f"✅ Repaired node {report.node_id} ({report.stripe_count} stripe(s))"]
    lines += [f"   node {h}: {b} bytes" for h, b in report.per_helper.items()]
    lines.append(
        f"   downloaded {report.downloaded_bytes} bytes vs {report.naive_bytes} for a full decode "
        f"(ratio {report.ratio:.3f})"
    )
    _emit(args, summary, lines)
    return EXIT_OK


def _messages(field, exhaustive: bool, seed: int) -> tuple[list[Message], int, str]:
    """
    Messages to push through encode/decode/repair. The exhaustive GF(4) set
    is one batch of symbol columns: every byte holds one element in its low
    bits, so the packed-block path computes element by element.
    """
    if exhaustive and field.order in EXHAUSTIVE_ORDERS:
        grid = all_scalar_messages(field)
        return [Message.from_symbols([grid[:, k].copy() for k in range(6)])], len(grid), "all"
    rng = np.random.default_rng(seed)
    grid = rng.integers(0, field.order, size=(SAMPLED_MESSAGES, 6))
    return [Message.from_symbols([int(x) for x in row]) for row in grid], len(grid), "sampled"


def _roundtrip_ok(inst, messages: list[Message]) -> tuple[bool, bool]:
    """(every subset decodes, every node repairs) for the messages."""
    decode_ok = repair_ok = True
    plans = {n: make_repair_plan(n, inst) for n in ALL_NODES}
    for message in messages:
        codeword = encode(message, inst)
        for subset in all_subsets():
            if decode(subset, codeword.pick(subset), inst) != message:
                decode_ok = False
        for node, plan in plans.items():
            sent = {h: helper_symbol(plan, h, codeword.segment(h)) for h in plan.helpers}
            if not segments_equal([execute_repair(plan, sent)], [codeword.segment(node)]):
                repair_ok = False
    return decode_ok, repair_ok


def cmd_verify(args: argparse.Namespace) -> int:
    field = _field(args.field)
    if args.params:
        params_list = [_params(args.params)]
        if params_list[0].field != field:
            raise UsageError(f"--params are over GF({params_list[0].field.order}), not {field}")
        census = None
    else:
        if field.order > MAX_CENSUS_ORDER:
            raise UsageError(f"census is limited to fields up to GF({MAX_CENSUS_ORDER}); pass --params")
        census = enumerate_valid_params(field)
        params_list = list(census.valid)
    if args.limit is not None:
        params_list = params_list[: args.limit]

    messages, n_messages, mode = _messages(field, args.exhaustive, args.seed)
    rows = []
    for params in params_list:
        row: dict[str, Any] = {"params": params.serialize()}
        try:
            inst = make_instance(params)
        except MDSError as exc:
            row.update(valid=False, error=str(exc))
            rows.append(row)
            continue
        row["mds"] = brute_force_mds(inst)
        row["identity"] = structural_identity(inst)
        aligned = oracle = True
        for node in ALL_NODES:
            try:
                plan = make_repair_plan(node, inst)
            except RepairError:
                aligned = False
                continue
            aligned &= verify_alignment(plan, inst).ok
            if field.order in EXHAUSTIVE_ORDERS:
                pair = (plan.downloads[plan.mixed[0]], plan.downloads[plan.mixed[1]])
                oracle &= pair in brute_force_repair_search(node, inst)
        row["aligned"] = aligned
        row["oracle"] = oracle if field.order in EXHAUSTIVE_ORDERS else "n/a"
        if row["mds"] and aligned:
            row["decode"], row["repair"] = _roundtrip_ok(inst, messages)
        else:
            row["decode"] = row["repair"] = False
        rows.append(row)

    table = pd.DataFrame(rows)
    checks = ("mds", "identity", "aligned", "oracle", "decode", "repair")
    # "n/a" marks a check that was not run
    passed = bool(rows) and all(row.get(c) is True or row.get(c) == "n/a" for row in rows for c in checks)

    lines = [f"mds53 verify over {field}", ""]
    if census is not None:
        lines.append(f"Valid parameter tuples: {len(census.valid)} of {census.total}")
    lines.append(f"Messages checked per tuple: {n_messages} ({mode})")
    lines.append("")
    lines.append(table.to_string(index=False) if rows else "(no parameter tuples)")
    lines.append("")
    lines.append("✅ all checks passed" if passed else "❌ some checks failed")

    out_dir = config.report_dir()
    out_dir.mkdir(parents=True, exist_ok=True)
    out_report = out_dir / f"verify_{args.field.lower()}.txt"
    out_report.write_text("\n".join(lines) + "\n")
    lines.append(f"Wrote report: {out_report}")

    summary = {
        "verb": "verify",
        "field": str(field),
        "tuples": len(rows),
        "messages": n_messages,
        "passed": passed,
        "report": str(out_report),
    }
    _emit(args, summary, lines)
    return EXIT_OK if passed else EXIT_FAILURE


def cmd_search_params(args: argparse.Namespace) -> int:
    field = _field(args.field)
    if field.order > MAX_CENSUS_ORDER:
        raise UsageError(f"census is limited to fields up to GF({MAX_CENSUS_ORDER})")
    census = enumerate_valid_params(field)
    if args.out:
        Path(args.out).write_text(census.to_text())
    summary = {
        "verb": "search-params",
        "field": str(field),
        "valid": census.to_lines(),
        "total": census.total,
        "violations": dict(census.violations),
    }
    lines = [f"{len(census.valid)} valid tuple(s) of {census.total} over {field}"]
    lines += census.to_lines()
    if args.out:
        lines.append(f"✅ Wrote {args.out}")
    _emit(args, summary, lines)
    return EXIT_OK


def cmd_show_plan(args: argparse.Namespace) -> int:
    inst = make_instance(_params(args.params))
    plan = make_repair_plan(args.node, inst)
    summary = {
        "verb": "show-plan",
        "node": plan.failed,
        "family": plan.family,
        "downloads": {n: list(v) for n, v in plan.downloads.items()},
        "bandwidth": plan.bandwidth,
    }
    if args.json:
        summary["manifest"] = plan.to_manifest()
    _emit(args, summary, [plan.to_manifest().rstrip("\n")])
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = _ArgParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print a JSON summary instead of text")

    parser = _ArgParser(prog="mds53", description="(5,3) MDS storage code with optimal single-node repair")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgParser)

    p = sub.add_parser("encode", parents=[common], help="encode a file into a cluster directory")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out-dir", default=None)
    p.add_argument("--symbol-size", type=int, default=None)
    p.add_argument("--params", default=None, help="q=4;poly=0x7;lambda=2;mu=3;theta=3;eta=2")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("reconstruct", parents=[common], help="rebuild the file from three nodes")
    p.add_argument("--dir", default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--nodes", type=_node_list, default=None, help="e.g. 1,3,5")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("fail", parents=[common], help="truncate one node")
    p.add_argument("--dir", default=None)
    p.add_argument("--node", type=int, required=True, choices=ALL_NODES)
    p.set_defaults(func=cmd_fail)

    p = sub.add_parser("repair", parents=[common], help="repair one node")
    p.add_argument("--dir", default=None)
    p.add_argument("--node", type=int, required=True, choices=ALL_NODES)
    p.add_argument("--plan", default=None, help="plan manifest written by show-plan")
    p.set_defaults(func=cmd_repair)

    p = sub.add_parser("verify", parents=[common], help="cross-check the construction")
    p.add_argument("--field", default="gf4")
    p.add_argument("--params", default=None)
    p.add_argument("--exhaustive", action="store_true")
    p.add_argument("--limit", type=int, default=None, help="check at most this many tuples")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("search-params", parents=[common], help="list valid parameter tuples")
    p.add_argument("--field", default="gf4")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_search_params)

    p = sub.add_parser("show-plan", parents=[common], help="print the repair plan of a node")
    p.add_argument("--node", type=int, required=True, choices=ALL_NODES)
    p.add_argument("--params", default=None)
    p.set_defaults(func=cmd_show_plan)
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(level=config.LOG_LEVEL, format="%(levelname)s %(name)s: %(message)s")
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (MDSError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


def main() -> None:
    sys.exit(run())
