"""Command-line entry point: ``qwalk embeddings|shunts|szegedy|mix|hit``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from qwalk import harness
from qwalk.embeddings import parse_rotation_system
from qwalk.errors import ParameterError, ParseError, QWalkError
from qwalk.factorizations import LinearOrders, parse_shunt_decomposition, validate_linear_orders_for_shunt_model
from qwalk.schemas import SCHEMAS
from qwalk.walks import (
    COIN_KINDS,
    arc_reversal_from_rotation,
    arc_reversal_unitary,
    make_coin,
    shunt_basis_arcs,
    shunt_unitary,
    simple_random_walk,
    szegedy_unitary,
)

EXIT_OK = 0
EXIT_PARAMETER = 2
EXIT_PARSE = 3


def _arc(text: str) -> tuple[int, int]:
    try:
        a, b = (int(x) for x in text.replace("(", "").replace(")", "").split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"arc must look like 'u,v', got {text!r}") from None
    return (a, b)


def _common(p: argparse.ArgumentParser, coin_default: str | None = None):
    p.add_argument("--graph", required=True, help="graph6 string, @file, or a named graph (K4, K33, K2xK3, Q3)")
    if coin_default is not None:
        p.add_argument("--coin", choices=COIN_KINDS, default=coin_default)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", type=Path, help="write output here instead of stdout")
    p.add_argument("--raw", action="store_true", help="17 significant digits instead of 6 decimals")


def _structure_args(p: argparse.ArgumentParser):
    p.add_argument("--model", choices=("arc-reversal", "shunt", "szegedy"), default="arc-reversal")
    p.add_argument("--rotation", help="rotation system, e.g. '0: (1, 2, 3), 1: (0, 3, 2), ...'")
    p.add_argument("--orders", help="linear orders as JSON, e.g. '[[1,2,3],[0,2,3],...]'")
    p.add_argument("--shunts", help="shunt-decomposition in cycle notation")
    p.add_argument("--order", choices=("r2r1", "r1r2"), default="r2r1", help="reflection order (szegedy)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qwalk", description="Discrete-time quantum walks from combinatorial data.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("embeddings", help="arc-reversal walks over every rotation system")
    _common(p, "circulant7")
    p.add_argument("--group", action="store_true", help="collapse to (genus, trace, count)")

    p = sub.add_parser("shunts", help="shunt walks over every shunt-decomposition")
    _common(p, "gauss")
    p.add_argument("--group", action="store_true", help="collapse to one row per cycle signature")

    p = sub.add_parser("szegedy", help="two-reflection walk of the simple random walk")
    _common(p)
    p.add_argument("--from", dest="src", type=_arc)
    p.add_argument("--to", dest="dst", type=_arc)
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--order", choices=("r2r1", "r1r2"), default="r2r1")

    p = sub.add_parser("mix", help="average mixing matrix of one walk")
    _common(p, "circulant7")
    _structure_args(p)

    p = sub.add_parser("hit", help="hitting times of one walk")
    _common(p, "circulant7")
    _structure_args(p)
    p.add_argument("--from", dest="src", type=_arc, required=True)
    p.add_argument("--to", dest="dst", type=_arc, required=True)
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--k-max", type=int)

    p = sub.add_parser("schema", help="print the JSON Schema of a record type")
    p.add_argument("name", choices=sorted(SCHEMAS))
    return parser


def _walk(args, g):
    """Return (unitary, arc labels, structure id) for --model and its structure flag."""
    if args.model == "szegedy":
        u = szegedy_unitary(simple_random_walk(g), order=args.order)
        return u, list(u.basis), "simple-random-walk"
    d = g.regular_degree()
    if d is None:
        raise ParameterError("coined walks here need a regular graph")
    coin = make_coin(args.coin, d)
    if args.model == "arc-reversal":
        if args.rotation:
            rot = parse_rotation_system(args.rotation)
            return arc_reversal_from_rotation(g, rot, coin), list(g.arcs), rot.format()
        if args.orders:
            lo = LinearOrders.of(_json_arg(args.orders))
            return arc_reversal_unitary(g, lo, coin), list(g.arcs), json.dumps([list(o) for o in lo.f])
        lo = LinearOrders.lexicographic(g)
        return arc_reversal_unitary(g, lo, coin), list(g.arcs), "lexicographic"
    if args.shunts:
        dec = parse_shunt_decomposition(args.shunts, g.n)
    elif args.orders:
        dec = validate_linear_orders_for_shunt_model(g, LinearOrders.of(_json_arg(args.orders)))
    else:
        raise ParameterError("--model shunt needs --shunts or --orders")
    return shunt_unitary(g, dec, coin), shunt_basis_arcs(dec), dec.cycle_notation()


def _json_arg(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e.msg}", e.pos) from None


def run(args) -> str:
    if args.command == "schema":
        return harness.to_json(SCHEMAS[args.name])
    g = harness.resolve_graph(args.graph)
    raw = args.raw

    if args.command == "embeddings":
        rows = harness.embedding_rows(g, args.coin)
        if args.group:
            grouped = harness.group_embedding_rows(rows)
            if args.format == "json":
                return harness.to_json([{"genus": a, "trace": t, "count": c} for a, t, c in grouped])
            return harness.to_csv(["genus", "trace", "count"], [[a, f"{t:.6f}", c] for a, t, c in grouped])
        if args.format == "json":
            return harness.to_json([
                {"index": r.index, "rotation": r.rotation.format(), "genus": r.genus,
                 "trace": r.trace, "total_entropy": r.total_entropy} for r in rows])
        return harness.to_csv(
            ["index", "rotation", "genus", "trace", "total_entropy"],
            [[r.index, r.rotation.format(), r.genus, harness.format_float(r.trace, raw),
              harness.format_float(r.total_entropy, raw)] for r in rows])

    if args.command == "shunts":
        rows = harness.shunt_rows(g, args.coin)
        if args.group:
            grouped = harness.group_shunt_rows(rows)
            if args.format == "json":
                return harness.to_json(grouped)
            return harness.to_csv(
                ["signature", "symmetric", "count", "trace_min", "trace_max", "representative"],
                [[x["signature"], x["symmetric"], x["count"], harness.format_float(x["trace_min"], raw),
                  harness.format_float(x["trace_max"], raw), x["representative"]] for x in grouped])
        if args.format == "json":
            return harness.to_json([
                {"index": r.index, "decomposition": r.decomposition.cycle_notation(), "signature": r.signature,
                 "symmetric": r.symmetric, "trace": r.trace, "total_entropy": r.total_entropy} for r in rows])
        return harness.to_csv(
            ["index", "decomposition", "signature", "symmetric", "trace", "total_entropy"],
            [[r.index, r.decomposition.cycle_notation(), r.signature, r.symmetric,
              harness.format_float(r.trace, raw), harness.format_float(r.total_entropy, raw)] for r in rows])

    if args.command == "szegedy":
        if (args.src is None) != (args.dst is None):
            raise ParameterError("--from and --to go together")
        rec = harness.szegedy_record(g, args.src, args.dst, args.eps, args.order)
        if args.format == "json":
            return harness.to_json(rec)
        flat = {
            "graph6": rec["graph6"], "order": rec["order"],
            **{f"unitary_{k}": v for k, v in rec["unitary"].items()},
            **{f"mixing_{k}": v for k, v in rec["mixing"].items()},
        }
        if rec["hitting"]:
            flat.update({f"hitting_{k}": v for k, v in rec["hitting"]["value"].items()})
        return harness.to_csv(list(flat), [[_cell(v, raw) for v in flat.values()]])

    u, labels, sid = _walk(args, g)
    if args.command == "mix":
        header, body, amm = harness.mixing_table(u, labels, raw=raw)
        if args.format == "json":
            return harness.to_json({
                "model": u.model, "graph6": harness.write_graph6(g), "structure_id": sid,
                "arcs": [list(a) for a in labels], "matrix": amm.matrix,
                "trace": amm.trace, "total_entropy": amm.total_entropy,
                "column_entropies": amm.column_entropies,
                "walk_regular": amm.walk_regular, "uniform": amm.uniform,
                "simple_spectrum": amm.simple_spectrum})
        return harness.to_csv(header, body)

    if args.command == "hit":
        rec = harness.hitting_record(u, g, sid, args.src, args.dst, args.eps, labels, args.k_max)
        if args.format == "json":
            return harness.to_json(rec)
        row = {"model": rec["model"], "graph6": rec["graph6"], "structure_id": rec["structure_id"],
               "x": "-".join(map(str, args.src)), "y": "-".join(map(str, args.dst)), "eps": args.eps,
               **rec["value"], **rec["flags"]}
        return harness.to_csv(list(row), [[_cell(v, raw) for v in row.values()]])
    raise ParameterError(f"unknown command {args.command}")


def _cell(v, raw):
    if isinstance(v, float):
        return harness.format_float(v, raw)
    return "" if v is None else v


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        text = run(args)
    except ParseError as e:
        print(f"qwalk: parse error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except (ParameterError, QWalkError, OSError) as e:
        print(f"qwalk: {e}", file=sys.stderr)
        return EXIT_PARAMETER
    if getattr(args, "out", None):
        args.out.write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
