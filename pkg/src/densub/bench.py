"""Benchmark harness: run extraction routes over instance files, tabulate results.

Timings cover algorithm execution only; file parsing is clocked separately and
reported as load time.  A route that fails (for example, over the memory
budget) leaves ``--`` marks in its columns rather than aborting the run.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .exact import densest_exact
from .graph import Graph, GraphFormatError, LoadReport, MemoryBudgetError, load_edge_list, load_matrix_market
from .hybrid import run_hybrid
from .peel import peel

CSV_HEADER = "problem,|V|,|E|,T_G,f_G,T_2,T_3,T_H,f_H,T_E,f*"
_ALGORITHMS = ("greedy", "hybrid", "exact")


@dataclass
class BenchRecord:
    """One instance's row: sizes, per-route times (ms) and densities.

    ``None`` fields render as ``--`` (route not run or failed).
    """

    problem: str
    n: int | None = None
    m: int | None = None
    t_g: float | None = None
    f_g: float | None = None
    t_2: float | None = None
    t_3: float | None = None
    t_h: float | None = None
    f_h: float | None = None
    t_e: float | None = None
    f_star: float | None = None
    load_ms: float | None = None
    error: str | None = None

    @property
    def failed(self) -> bool:
        return self.error is not None


def compute_gap(f_g: float, f_star: float) -> float:
    """Greedy-to-optimal gap as a percentage of the optimum, clamped at 0."""
    if f_star <= 0:
        raise ValueError("optimum density must be positive")
    return max(0.0, 100.0 * (f_star - f_g) / f_star)


def _fmt_density(x: float | None) -> str:
    return "--" if x is None else f"{x:.4f}"


def _fmt_time(x: float | None) -> str:
    return "--" if x is None else f"{x:.1f}"


def _fmt_int(x: int | None) -> str:
    return "--" if x is None else str(x)


def run_instance(
    graph: Graph,
    name: str,
    load_ms: float | None = None,
    algorithms: Sequence[str] = _ALGORITHMS,
    skip_ratio: float = 0.85,
    tolerance: float | None = None,
    memory_budget: int | None = None,
) -> BenchRecord:
    """Run the requested routes on one loaded graph, tolerating failures."""
    rec = BenchRecord(problem=name, n=graph.n, m=graph.m, load_ms=load_ms)
    errors = []
    if "greedy" in algorithms:
        try:
            pr = peel(graph)
            rec.t_g = pr.elapsed_ms
            rec.f_g = float(pr.best.density)
        except Exception as exc:  # noqa: BLE001 - every route failure becomes a mark
            errors.append(f"greedy: {exc}")
    if "hybrid" in algorithms:
        try:
            hr = run_hybrid(
                graph,
                skip_ratio=skip_ratio,
                tolerance=tolerance,
                memory_budget=memory_budget,
            )
            if hr.failed:
                errors.append("hybrid: exact phase over memory budget")
            else:
                rec.t_2 = hr.t_expand_ms
                rec.t_3 = hr.t_exact_ms
                rec.t_h = hr.total_ms
                rec.f_h = float(hr.best.density)
        except Exception as exc:  # noqa: BLE001
            errors.append(f"hybrid: {exc}")
    if "exact" in algorithms:
        try:
            er = densest_exact(
                graph, tolerance=tolerance, memory_budget=memory_budget
            )
            rec.t_e = er.elapsed_ms
            rec.f_star = float(er.best.density)
        except MemoryBudgetError as exc:
            errors.append(f"exact: {exc}")
        except Exception as exc:  # noqa: BLE001
            errors.append(f"exact: {exc}")
    if errors:
        rec.error = "; ".join(errors)
    return rec


def _load_any(path: Path, weighted_hint: bool | None, memory_budget: int | None):
    import time

    t0 = time.perf_counter()
    if path.suffix.lower() in (".mtx", ".mm"):
        graph, report = load_matrix_market(path, memory_budget=memory_budget)
    else:
        graph, report = load_edge_list(
            path, weighted=weighted_hint, memory_budget=memory_budget
        )
    return graph, report, (time.perf_counter() - t0) * 1e3


def parse_manifest(manifest_path: str | Path) -> list[tuple[Path, bool | None]]:
    """Read one instance path per line, with an optional ``weighted`` token.

    Blank lines and ``#`` comments are skipped; relative paths resolve against
    the manifest's own directory.
    """
    mpath = Path(manifest_path)
    base = mpath.parent
    entries: list[tuple[Path, bool | None]] = []
    for raw in mpath.read_text(encoding="utf-8").splitlines():
        s = raw.strip()
        if not s or s.startswith("#"):
            continue
        toks = s.split()
        weighted: bool | None = None
        if len(toks) > 1:
            if toks[1].lower() != "weighted":
                raise GraphFormatError(f"unrecognized manifest token {toks[1]!r}")
            weighted = True
        p = Path(toks[0])
        if not p.is_absolute():
            p = base / p
        entries.append((p, weighted))
    return entries


def run_manifest(
    manifest_path: str | Path,
    algorithms: Sequence[str] = _ALGORITHMS,
    skip_ratio: float = 0.85,
    tolerance: float | None = None,
    memory_budget: int | None = None,
    jobs: int = 1,
) -> list[BenchRecord]:
    """Benchmark every instance in a manifest file.

    With ``jobs > 1`` instances run in parallel worker threads (the compiled
    kernels release the GIL); per-instance routes stay sequential so phase
    timings remain meaningful, though concurrent timings are noisier.
    """
    entries = parse_manifest(manifest_path)

    def _one(entry: tuple[Path, bool | None]) -> BenchRecord:
        path, weighted = entry
        name = path.stem
        try:
            graph, _report, load_ms = _load_any(path, weighted, memory_budget)
        except (OSError, GraphFormatError, MemoryBudgetError) as exc:
            return BenchRecord(problem=name, error=f"load: {exc}")
        return run_instance(
            graph,
            name,
            load_ms=load_ms,
            algorithms=algorithms,
            skip_ratio=skip_ratio,
            tolerance=tolerance,
            memory_budget=memory_budget,
        )

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_one, entries))
    return [_one(e) for e in entries]


def records_to_csv(records: Iterable[BenchRecord]) -> str:
    lines = [CSV_HEADER]
    for r in records:
        lines.append(
            ",".join(
                [
                    r.problem,
                    _fmt_int(r.n),
                    _fmt_int(r.m),
                    _fmt_time(r.t_g),
                    _fmt_density(r.f_g),
                    _fmt_time(r.t_2),
                    _fmt_time(r.t_3),
                    _fmt_time(r.t_h),
                    _fmt_density(r.f_h),
                    _fmt_time(r.t_e),
                    _fmt_density(r.f_star),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def records_to_json(records: Iterable[BenchRecord]) -> str:
    rows = []
    for r in records:
        rows.append(
            {
                "problem": r.problem,
                "|V|": r.n,
                "|E|": r.m,
                "T_G": r.t_g,
                "f_G": r.f_g,
                "T_2": r.t_2,
                "T_3": r.t_3,
                "T_H": r.t_h,
                "f_H": r.f_h,
                "T_E": r.t_e,
                "f*": r.f_star,
                "load_ms": r.load_ms,
                "error": r.error,
            }
        )
    return json.dumps(rows, indent=2) + "\n"


def records_to_text(records: Iterable[BenchRecord]) -> str:
    out = []
    for r in records:
        out.append(f"{r.problem}: |V| = {_fmt_int(r.n)}, |E| = {_fmt_int(r.m)}")
        if r.load_ms is not None:
            out[-1] += f" (load {r.load_ms:.1f} ms)"
        if r.t_g is not None:
            out.append(
                f"  greedy: f_G = {_fmt_density(r.f_g)}, T_G = {_fmt_time(r.t_g)} ms"
            )
        if r.t_h is not None:
            out.append(
                f"  hybrid: f_H = {_fmt_density(r.f_h)}, "
                f"T_2 = {_fmt_time(r.t_2)} ms, T_3 = {_fmt_time(r.t_3)} ms, "
                f"T_H = {_fmt_time(r.t_h)} ms"
            )
        if r.t_e is not None:
            out.append(
                f"  exact: f* = {_fmt_density(r.f_star)}, T_E = {_fmt_time(r.t_e)} ms"
            )
        if r.f_g is not None and r.f_star is not None and r.f_star > 0:
            out.append(f"  gap: {compute_gap(r.f_g, r.f_star):.2f}%")
        if r.error is not None:
            out.append(f"  error: {r.error} (failed cells marked --)")
    return "\n".join(out) + "\n"
