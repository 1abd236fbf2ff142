"""Command-line interface: run extraction routes, generate instances, export LPs.

Exit codes: 0 on success, 1 on usage errors, 2 when an instance could not be
loaded or a route failed (failed cells print as ``--``).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .bench import (
    BenchRecord,
    records_to_csv,
    records_to_json,
    records_to_text,
    run_instance,
    run_manifest,
)
from .exact import densest_exact
from .graph import (
    GraphFormatError,
    MemoryBudgetError,
    load_edge_list,
    load_matrix_market,
    to_edge_list,
)
from .hybrid import run_hybrid
from .instances import gen_random, gen_worstcase
from .lp import emit_charikar_lp
from .peel import peel


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with code 2 on bad flags; this CLI reserves 2 for
    # instance failures, so usage problems are rerouted to exit code 1
    def error(self, message):
        raise _UsageError(message)


def _add_io_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("instance", help="graph file, or - for standard input")
    p.add_argument(
        "--format",
        choices=("auto", "mm", "edgelist"),
        default="auto",
        help="input format (auto: .mtx/.mm means Matrix Market)",
    )
    p.add_argument(
        "--weighted",
        action="store_true",
        help="require an edge-list weight column",
    )
    p.add_argument("--out", choices=("text", "json", "csv"), default="text")
    p.add_argument("--out-file", help="write the report here instead of stdout")
    p.add_argument(
        "--report-set", action="store_true", help="also print the vertex set"
    )
    p.add_argument(
        "--memory-budget-mb",
        type=float,
        default=None,
        help="fail any allocation-heavy step beyond this budget",
    )


def _budget_bytes(args) -> int | None:
    if getattr(args, "memory_budget_mb", None) is None:
        return None
    return int(args.memory_budget_mb * 1024 * 1024)


def _load_instance(args):
    import time

    path = args.instance
    budget = _budget_bytes(args)
    fmt = args.format
    if fmt == "auto":
        fmt = (
            "mm"
            if path != "-" and Path(path).suffix.lower() in (".mtx", ".mm")
            else "edgelist"
        )
    source = sys.stdin if path == "-" else path
    t0 = time.perf_counter()
    if fmt == "mm":
        graph, report = load_matrix_market(source, memory_budget=budget)
        if args.weighted and not graph.weighted:
            raise GraphFormatError("--weighted given but the matrix is pattern-only")
    else:
        graph, report = load_edge_list(
            source, weighted=True if args.weighted else None, memory_budget=budget
        )
    load_ms = (time.perf_counter() - t0) * 1e3
    name = "stdin" if path == "-" else Path(path).stem
    return graph, report, load_ms, name


def _emit(args, text: str) -> None:
    if args.out_file:
        Path(args.out_file).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _labels_of(report, members) -> list[int]:
    labels = report.labels
    shown = members if labels is None else labels[members]
    return sorted(int(x) for x in shown)


def _labels_line(report, members) -> str:
    return "S = " + " ".join(str(x) for x in _labels_of(report, members))


def _single_report(args, rec: BenchRecord, extras: dict, set_line: str | None) -> None:
    if args.out == "csv":
        _emit(args, records_to_csv([rec]))
    elif args.out == "json":
        row = json.loads(records_to_json([rec]))[0]
        row.update(extras)
        _emit(args, json.dumps(row, indent=2) + "\n")
    else:
        text = records_to_text([rec])
        if set_line:
            text += set_line + "\n"
        _emit(args, text)


def _run_single(args, which: str) -> int:
    try:
        graph, report, load_ms, name = _load_instance(args)
    except (OSError, GraphFormatError, MemoryBudgetError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if graph.n == 0:
        print("error: instance has no vertices", file=sys.stderr)
        return 2
    budget = _budget_bytes(args)
    rec = BenchRecord(problem=name, n=graph.n, m=graph.m, load_ms=load_ms)
    extras: dict = {}
    set_line = None
    code = 0
    if which == "greedy":
        pr = peel(graph)
        rec.t_g = pr.elapsed_ms
        rec.f_g = float(pr.best.density)
        extras["|S|"] = pr.best.size
        extras["moves"] = pr.moves
        if args.report_set:
            set_line = _labels_line(report, pr.best.members)
            extras["set"] = _labels_of(report, pr.best.members)
    elif which == "exact":
        try:
            er = densest_exact(graph, tolerance=args.tolerance, memory_budget=budget)
            rec.t_e = er.elapsed_ms
            rec.f_star = float(er.best.density)
            extras["|S|"] = er.best.size
            extras["iterations"] = er.iterations
            extras["certified"] = er.certified
            if args.report_set:
                set_line = _labels_line(report, er.best.members)
                extras["set"] = _labels_of(report, er.best.members)
        except MemoryBudgetError as exc:
            rec.error = f"exact: {exc}"
            code = 2
    else:
        try:
            hr = run_hybrid(
                graph,
                skip_ratio=args.skip_ratio,
                tolerance=args.tolerance,
                memory_budget=budget,
            )
            rec.t_g = hr.t_peel_ms
            rec.f_g = float(hr.greedy.density)
            if hr.failed:
                rec.error = "hybrid: exact phase over memory budget"
                code = 2
            else:
                rec.t_2 = hr.t_expand_ms
                rec.t_3 = hr.t_exact_ms
                rec.t_h = hr.total_ms
                rec.f_h = float(hr.best.density)
                extras["|S|"] = hr.best.size
                extras["skipped"] = hr.skipped
                if args.report_set:
                    set_line = _labels_line(report, hr.best.members)
                    extras["set"] = _labels_of(report, hr.best.members)
        except MemoryBudgetError as exc:
            rec.error = f"hybrid: {exc}"
            code = 2
    _single_report(args, rec, extras, set_line)
    return code


def _cmd_gen(args) -> int:
    try:
        if args.family == "worstcase":
            graph = gen_worstcase(args.t, args.p)
        else:
            graph = gen_random(
                args.n,
                args.m,
                args.seed,
                weighted=args.weighted,
                weight_low=args.weight_low,
                weight_high=args.weight_high,
                integer_weights=args.integer_weights,
            )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.out_file:
        to_edge_list(graph, args.out_file)
    else:
        to_edge_list(graph, sys.stdout)
    return 0


def _cmd_lp(args) -> int:
    try:
        graph, _report, _load_ms, _name = _load_instance(args)
    except (OSError, GraphFormatError, MemoryBudgetError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.out_file:
        summary = emit_charikar_lp(graph, args.out_file)
        print(f"variables: {summary.variables}, constraints: {summary.constraints}")
    else:
        summary = emit_charikar_lp(graph, sys.stdout)
        print(
            f"variables: {summary.variables}, constraints: {summary.constraints}",
            file=sys.stderr,
        )
    return 0


def _cmd_bench(args) -> int:
    try:
        records = run_manifest(
            args.manifest,
            algorithms=tuple(args.algorithms.split(",")),
            skip_ratio=args.skip_ratio,
            tolerance=args.tolerance,
            memory_budget=_budget_bytes(args),
            jobs=args.jobs,
        )
    except (OSError, GraphFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.out == "csv":
        _emit(args, records_to_csv(records))
    elif args.out == "json":
        _emit(args, records_to_json(records))
    else:
        _emit(args, records_to_text(records))
    return 2 if any(r.failed for r in records) else 0


def _build_parser() -> _Parser:
    parser = _Parser(prog="densub", description=__doc__)
    parser.add_argument("--version", action="version", version=f"densub {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_peel = sub.add_parser("peel", help="greedy peeling (2-approximation)")
    _add_io_args(p_peel)

    p_exact = sub.add_parser("exact", help="exact maximum-density set")
    _add_io_args(p_exact)
    p_exact.add_argument(
        "--tolerance",
        type=float,
        default=None,
        help="binary-search width for real-weighted graphs",
    )

    p_hybrid = sub.add_parser("hybrid", help="peel, expand, exact on the core")
    _add_io_args(p_hybrid)
    p_hybrid.add_argument("--skip-ratio", type=float, default=0.85)
    p_hybrid.add_argument("--tolerance", type=float, default=None)

    p_gen = sub.add_parser("gen", help="generate an instance as an edge list")
    gen_sub = p_gen.add_subparsers(dest="family", required=True)
    p_wc = gen_sub.add_parser("worstcase", help="hub-and-pairs greedy trap")
    p_wc.add_argument("--t", type=int, required=True, help="spoke count")
    p_wc.add_argument("--p", type=int, required=True, help="pair count")
    p_wc.add_argument("-o", "--out-file", default=None)
    p_rand = gen_sub.add_parser("random", help="uniform simple graph")
    p_rand.add_argument("--n", type=int, required=True)
    p_rand.add_argument("--m", type=int, required=True)
    p_rand.add_argument("--seed", type=int, required=True)
    p_rand.add_argument("--weighted", action="store_true")
    p_rand.add_argument("--integer-weights", action="store_true")
    p_rand.add_argument("--weight-low", type=float, default=1.0)
    p_rand.add_argument("--weight-high", type=float, default=10.0)
    p_rand.add_argument("-o", "--out-file", default=None)

    p_lp = sub.add_parser("lp-export", help="write the density LP relaxation")
    _add_io_args(p_lp)

    p_bench = sub.add_parser("bench", help="run routes over a manifest of instances")
    p_bench.add_argument("--manifest", required=True)
    p_bench.add_argument(
        "--algorithms",
        default="greedy,hybrid,exact",
        help="comma-separated subset of greedy,hybrid,exact",
    )
    p_bench.add_argument("--skip-ratio", type=float, default=0.85)
    p_bench.add_argument("--tolerance", type=float, default=None)
    p_bench.add_argument("--memory-budget-mb", type=float, default=None)
    p_bench.add_argument("--jobs", type=int, default=1)
    p_bench.add_argument("--out", choices=("text", "json", "csv"), default="text")
    p_bench.add_argument("--out-file", default=None)
    return parser


def cli_main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    try:
        if args.command == "peel":
            return _run_single(args, "greedy")
        if args.command == "exact":
            return _run_single(args, "exact")
        if args.command == "hybrid":
            return _run_single(args, "hybrid")
        if args.command == "gen":
            return _cmd_gen(args)
        if args.command == "lp-export":
            return _cmd_lp(args)
        if args.command == "bench":
            return _cmd_bench(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    raise AssertionError("unreachable command")


def main() -> None:
    sys.exit(cli_main(sys.argv[1:]))


if __name__ == "__main__":
    main()
