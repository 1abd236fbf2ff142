"""Export the density LP relaxation in CPLEX LP text format.

One variable per edge and per vertex: maximize the (weighted) sum of edge
variables subject to each edge variable being at most either endpoint's
vertex variable, with vertex variables summing to at most 1.  All variables
are nonnegative (the format's default bounds).  The optimum of this LP upper-
bounds the maximum density, with equality on unweighted graphs.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import IO, Union

from .graph import Graph


@dataclass
class LpSummary:
    """Counts of what was written: |V|+|E| variables, 2|E|+1 constraint rows."""

    variables: int
    constraints: int


def _write_expr(out: IO, prefix: str, terms: list[str], suffix: str = "") -> None:
    # wrap long expressions; continuation lines may start with '+'
    line = prefix
    for k, term in enumerate(terms):
        piece = (" " if k == 0 else " + ") + term
        if len(line) + len(piece) > 72:
            out.write(line + "\n")
            line = ("    + " if k else "    ") + term
        else:
            line += piece
    out.write(line + suffix + "\n")


def emit_charikar_lp(graph: Graph, sink: Union[str, Path, IO]) -> LpSummary:
    """Write the LP relaxation for ``graph`` and return variable/row counts.

    Row names are ``e{i}_u`` and ``e{i}_v`` for the two per-edge constraints
    (edge index i in lexicographic edge order) and ``norm`` for the vertex-sum
    row.  Edge weights appear as objective coefficients.
    """
    if graph.n == 0:
        raise ValueError("empty graph")
    out, owned = (open(sink, "w", encoding="utf-8"), True) if isinstance(
        sink, (str, Path)
    ) else (sink, False)
    try:
        eu, ev, ew = graph.edge_arrays()
        m = graph.m
        out.write("\\ density LP relaxation\n")
        out.write("Maximize\n")
        if m == 0:
            out.write(" obj: 0 y0\n")
        else:
            if ew is None:
                terms = [f"x{i}" for i in range(m)]
            else:
                terms = [f"{float(w)!r} x{i}" for i, w in enumerate(ew)]
            _write_expr(out, " obj:", terms)
        out.write("Subject To\n")
        for i in range(m):
            out.write(f" e{i}_u: x{i} - y{eu[i]} <= 0\n")
            out.write(f" e{i}_v: x{i} - y{ev[i]} <= 0\n")
        _write_expr(out, " norm:", [f"y{v}" for v in range(graph.n)], " <= 1")
        out.write("End\n")
    finally:
        if owned:
            out.close()
    return LpSummary(variables=graph.n + m, constraints=2 * m + 1)
