"""Exact maximum-density vertex set via binary search on min cuts.

A float binary search narrows the density range, jumping the lower bound to
the exact density of each nonempty cut side it finds.  On unweighted and
integer-weighted graphs a final certificate loop re-tests the incumbent's
exact rational density on an integer-capacity network: an empty source side
there *proves* optimality, a nonempty one strictly improves the incumbent, so
the result is exact regardless of floating-point noise along the way.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .graph import (
    _EMPTY_F64,
    DenseSet,
    Density,
    Graph,
    _induced_stats,
    density,
    set_density,
)
from .maxflow import build_goldberg_network, max_flow_push_relabel

# int64 capacities: keep n * W * scale clear of overflow during flow accumulation
_INT_FLOW_LIMIT = 2**61


@dataclass
class ExactResult:
    """Maximum-density set, max-flow call count, and exactness certification.

    ``certified`` is True when the integer certificate loop proved optimality
    (always attainable for unweighted and integral-weight graphs unless the
    caller supplied a tolerance or scaled capacities would overflow).
    """

    best: DenseSet
    iterations: int
    certified: bool
    elapsed_ms: float


def _exact_density(graph: Graph, members: np.ndarray) -> Fraction:
    """Rational induced density; valid when weights are absent or integral."""
    mask = np.zeros(graph.n, dtype=np.bool_)
    mask[members] = True
    cnt2, wsum2 = _induced_stats(
        graph.offsets,
        graph.neighbors,
        graph.weights if graph.weights is not None else _EMPTY_F64,
        graph.weights is not None,
        members,
        mask,
    )
    if graph.weights is None:
        return Fraction(int(cnt2), 2 * int(members.size))
    return Fraction(int(round(wsum2)), 2 * int(members.size))


def densest_exact(
    graph: Graph,
    lower: float | None = None,
    upper: float | None = None,
    tolerance: float | None = None,
    memory_budget: int | None = None,
) -> ExactResult:
    """Find the vertex set of maximum density.

    ``lower``/``upper`` may bracket the optimum to shorten the search (the
    whole-graph density and half the maximum weighted degree are used by
    default).  ``tolerance`` sets the binary-search stopping width for graphs
    with general real weights; leaving it None on unweighted or
    integer-weighted graphs enables the exact certificate loop.  A
    ``memory_budget`` (bytes) bounds the flow network allocation, failing fast
    with :class:`~densub.graph.MemoryBudgetError`.
    """
    t0 = time.perf_counter()
    n = graph.n
    if n == 0:
        raise ValueError("empty graph")
    if graph.m == 0:
        zero: Density = 0.0 if graph.weighted else Fraction(0)
        best = DenseSet(np.array([0], dtype=np.int64), zero, "exact")
        return ExactResult(best, 0, True, (time.perf_counter() - t0) * 1e3)

    exact_mode = (not graph.weighted or graph.integral_weights) and tolerance is None
    wdeg = graph.weighted_degrees()
    w_total = graph.total_weight

    f_whole = density(graph)
    lo = float(lower) if lower is not None else float(f_whole)
    hi = float(upper) if upper is not None else min(w_total, float(wdeg.max()) / 2.0)
    if hi < lo:
        hi = lo

    incumbent = np.arange(n, dtype=np.int64)
    incumbent_d: Density = (
        _exact_density(graph, incumbent) if exact_mode else float(f_whole)
    )

    if exact_mode:
        stop = max(1.0 / (n * max(n - 1, 1)), hi * 1e-13, 1e-15)
    else:
        stop = tolerance if tolerance is not None else max(1e-9, hi * 1e-9)

    iters = 0
    net = None
    while hi - lo > stop:
        g = 0.5 * (lo + hi)
        if not lo < g < hi:
            break
        if net is None:
            net = build_goldberg_network(graph, g, memory_budget=memory_budget)
        else:
            net.base_cap[net.t_arc] = w_total + 2.0 * g - wdeg
            net.reset()
        cut = max_flow_push_relabel(net)
        iters += 1
        side = cut.source_side
        if side.size:
            d_side = (
                _exact_density(graph, side) if exact_mode else set_density(graph, side)
            )
            if d_side <= g:
                # numerically degenerate guess: behave as an empty side
                hi = g
                continue
            if d_side > incumbent_d:
                incumbent, incumbent_d = side, d_side
            lo = min(max(g, float(d_side)), hi)
        else:
            hi = g

    certified = False
    if exact_mode:
        w_int = int(round(w_total))
        while True:
            d = incumbent_d
            assert isinstance(d, Fraction)
            if n * w_int * d.denominator >= _INT_FLOW_LIMIT:
                break
            net_i = build_goldberg_network(graph, d, memory_budget=memory_budget)
            cut = max_flow_push_relabel(net_i)
            iters += 1
            side = cut.source_side
            if side.size == 0:
                certified = True
                break
            d_side = _exact_density(graph, side)
            if d_side <= d:
                raise AssertionError("integer certificate produced a non-improving set")
            incumbent, incumbent_d = side, d_side

    members = np.sort(incumbent)
    final_d: Density = incumbent_d if exact_mode else set_density(graph, members)
    best = DenseSet(members=members, density=final_d, source="exact")
    return ExactResult(
        best=best,
        iterations=iters,
        certified=certified,
        elapsed_ms=(time.perf_counter() - t0) * 1e3,
    )
