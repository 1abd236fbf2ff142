"""Immutable undirected graphs in CSR form, loaders, and density primitives.

A :class:`Graph` is always *simple*: no self-loops, no duplicate edges.  The
loaders canonicalize arbitrary input (dropping loops, merging duplicates) and
report what they cleaned up.  Unweighted densities are exact rationals
(:class:`fractions.Fraction`); weighted densities are 64-bit floats.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import IO, Iterable, Union

import numpy as np
from numba import njit

Density = Union[Fraction, float]

# ids live in int32 neighbor arrays; 2^53 is where float64 stops being exact
# for integer-valued weight sums, so larger totals lose the "integral" fast path.
_MAX_VERTICES = 2**31 - 1
_EXACT_FLOAT_LIMIT = float(2**53)


class GraphFormatError(ValueError):
    """Raised when an input stream is not a valid graph description."""


class MemoryBudgetError(RuntimeError):
    """Raised when a requested structure would exceed the caller's memory budget.

    ``estimate`` carries the projected allocation in bytes.
    """

    def __init__(self, message: str, estimate: int):
        super().__init__(message)
        self.estimate = estimate


@dataclass
class LoadReport:
    """What a loader cleaned up, plus the original vertex labels.

    ``labels[i]`` is the label the input file used for internal vertex ``i``.
    """

    loops_dropped: int = 0
    duplicates_merged: int = 0
    labels: np.ndarray | None = None


@dataclass
class DenseSet:
    """A vertex set together with its induced density and producing algorithm.

    ``members`` is sorted ascending; ``density`` equals the induced density of
    ``members`` in the graph it was computed on.  ``source`` names the route
    that produced it: ``'greedy'``, ``'exact'``, ``'hybrid'``, or ``'oracle'``.
    """

    members: np.ndarray
    density: Density
    source: str

    @property
    def size(self) -> int:
        return int(self.members.size)


@dataclass
class Graph:
    """Simple undirected graph in compressed sparse row form.

    Adjacency of vertex ``v`` is ``neighbors[offsets[v]:offsets[v+1]]``, sorted
    ascending.  Every edge appears in both endpoint rows; ``weights`` (when
    present) is aligned with ``neighbors`` and stores each edge's weight twice.
    Instances are treated as immutable once constructed.
    """

    n: int
    m: int
    offsets: np.ndarray            # int64, length n+1
    neighbors: np.ndarray          # int32, length 2m
    weights: np.ndarray | None     # float64, length 2m; None when unweighted
    total_weight: float = 0.0      # sum of edge weights; equals m when unweighted
    integral_weights: bool = field(default=False)

    @property
    def weighted(self) -> bool:
        return self.weights is not None

    def degrees(self) -> np.ndarray:
        return np.diff(self.offsets)

    def weighted_degrees(self) -> np.ndarray:
        """Per-vertex sum of incident edge weights (plain degree if unweighted)."""
        if self.weights is None:
            return np.diff(self.offsets).astype(np.float64)
        out = np.zeros(self.n, dtype=np.float64)
        np.add.at(out, np.repeat(np.arange(self.n), np.diff(self.offsets)), self.weights)
        return out

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray | None]:
        """Each edge once as (u, v[, w]) with u < v, ordered lexicographically."""
        src = np.repeat(np.arange(self.n, dtype=np.int64), np.diff(self.offsets))
        dst = self.neighbors.astype(np.int64)
        keep = src < dst
        w = self.weights[keep] if self.weights is not None else None
        return src[keep], dst[keep], w


def estimate_graph_bytes(n: int, m: int, weighted: bool) -> int:
    """Projected resident size of a CSR graph, excluding build transients."""
    per_arc = 4 + (8 if weighted else 0)
    return (n + 1) * 8 + 2 * m * per_arc


def _check_budget(estimate: int, budget: int | None, what: str) -> None:
    # build transients (sort permutations, key arrays) cost ~3x the final size
    if budget is not None and estimate * 3 > budget:
        raise MemoryBudgetError(
            f"{what} needs ~{estimate * 3} bytes (budget {budget})", estimate * 3
        )


@njit(cache=True, nogil=True)
def _induced_stats(offsets, neighbors, weights, has_w, members, mask):
    """Count (twice the edges, twice the weight) induced by the masked set."""
    cnt2 = np.int64(0)
    wsum2 = 0.0
    for i in range(members.size):
        v = members[i]
        for j in range(offsets[v], offsets[v + 1]):
            u = neighbors[j]
            if mask[u]:
                cnt2 += 1
                if has_w:
                    wsum2 += weights[j]
    return cnt2, wsum2


@njit(cache=True, nogil=True)
def _collect_induced(offsets, neighbors, weights, has_w, members, mask, newid, ecount):
    eu = np.empty(ecount, dtype=np.int64)
    ev = np.empty(ecount, dtype=np.int64)
    ew = np.empty(ecount if has_w else 0, dtype=np.float64)
    k = 0
    for i in range(members.size):
        v = members[i]
        for j in range(offsets[v], offsets[v + 1]):
            u = neighbors[j]
            if mask[u] and v < u:
                eu[k] = newid[v]
                ev[k] = newid[u]
                if has_w:
                    ew[k] = weights[j]
                k += 1
    return eu, ev, ew


_EMPTY_F64 = np.empty(0, dtype=np.float64)


def _csr_from_clean(
    n: int, lo: np.ndarray, hi: np.ndarray, w: np.ndarray | None
) -> Graph:
    """Build a Graph from edges already known to be loop-free and distinct."""
    m = int(lo.size)
    deg = np.bincount(lo, minlength=n) + np.bincount(hi, minlength=n)
    offsets = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(deg, out=offsets[1:])
    src = np.concatenate([lo, hi])
    dst = np.concatenate([hi, lo])
    perm = np.lexsort((dst, src))
    neighbors = dst[perm].astype(np.int32)
    weights = None
    total = float(m)
    integral = False
    if w is not None:
        weights = np.concatenate([w, w])[perm]
        total = float(w.sum())
        integral = bool(
            total < _EXACT_FLOAT_LIMIT and np.all(np.floor(w) == w)
        )
    return Graph(
        n=n,
        m=m,
        offsets=offsets,
        neighbors=neighbors,
        weights=weights,
        total_weight=total,
        integral_weights=integral,
    )


def from_edges(
    u: Iterable[int] | np.ndarray,
    v: Iterable[int] | np.ndarray,
    w: Iterable[float] | np.ndarray | None = None,
    n: int | None = None,
    memory_budget: int | None = None,
) -> tuple[Graph, LoadReport]:
    """Canonicalize raw endpoint arrays into a simple Graph.

    Self-loops are dropped and duplicate edges merged (weights summed).  ``n``
    defaults to ``max id + 1``.  Returns the graph and a report of what was
    cleaned up (``labels`` is left unset; loaders fill it).
    """
    ua = np.asarray(u, dtype=np.int64).ravel()
    va = np.asarray(v, dtype=np.int64).ravel()
    if ua.size != va.size:
        raise GraphFormatError("endpoint arrays differ in length")
    wa = None
    if w is not None:
        wa = np.asarray(w, dtype=np.float64).ravel()
        if wa.size != ua.size:
            raise GraphFormatError("weight array length mismatch")
        if wa.size and (not np.all(np.isfinite(wa)) or np.any(wa <= 0)):
            raise GraphFormatError("edge weights must be finite and positive")
    if ua.size:
        lo_id = int(min(ua.min(), va.min()))
        hi_id = int(max(ua.max(), va.max()))
        if lo_id < 0:
            raise GraphFormatError("negative vertex id")
        if n is None:
            n = hi_id + 1
        elif hi_id >= n:
            raise GraphFormatError(f"vertex id {hi_id} out of range for n={n}")
    elif n is None:
        n = 0
    if n > _MAX_VERTICES:
        raise GraphFormatError(f"{n} vertices exceeds the supported maximum")

    _check_budget(estimate_graph_bytes(n, ua.size, wa is not None), memory_budget, "graph")

    keep = ua != va
    loops = int(ua.size - keep.sum())
    ua, va = ua[keep], va[keep]
    if wa is not None:
        wa = wa[keep]

    report = LoadReport(loops_dropped=loops, duplicates_merged=0)
    if ua.size == 0:
        return _csr_from_clean(n, ua, va, wa), report

    lo = np.minimum(ua, va)
    hi = np.maximum(ua, va)
    key = lo * np.int64(n) + hi
    order = np.argsort(key, kind="stable")
    key = key[order]
    first = np.ones(key.size, dtype=bool)
    first[1:] = key[1:] != key[:-1]
    starts = np.flatnonzero(first)
    report.duplicates_merged = int(key.size - starts.size)
    lo_u = lo[order][starts]
    hi_u = hi[order][starts]
    w_u = None
    if wa is not None:
        w_u = np.add.reduceat(wa[order], starts)
    return _csr_from_clean(n, lo_u, hi_u, w_u), report


def _open_text(source: Union[str, Path, IO]) -> tuple[IO, bool]:
    if isinstance(source, (str, Path)):
        return open(source, "r", encoding="utf-8", errors="replace"), True
    if isinstance(source, io.TextIOBase):
        return source, False
    # byte streams (sys.stdin.buffer, open(..., 'rb')) get wrapped
    return io.TextIOWrapper(source, encoding="utf-8", errors="replace"), False


def load_matrix_market(
    source: Union[str, Path, IO], memory_budget: int | None = None
) -> tuple[Graph, LoadReport]:
    """Parse a Matrix Market coordinate file as an undirected graph.

    Accepts ``pattern`` (unweighted), ``integer``, and ``real`` fields with
    ``symmetric`` or ``general`` symmetry.  Entries are 1-based; self-loops are
    dropped, duplicates merged (weights summed), and a ``general`` matrix is
    symmetrized.  The matrix must be square.
    """
    stream, owned = _open_text(source)
    try:
        header = stream.readline()
        if not header.startswith("%%MatrixMarket"):
            raise GraphFormatError("missing MatrixMarket header")
        parts = header.split()
        if len(parts) < 5:
            raise GraphFormatError(f"malformed header: {header.strip()!r}")
        obj, fmt, fld, sym = (p.lower() for p in parts[1:5])
        if obj != "matrix" or fmt != "coordinate":
            raise GraphFormatError(f"unsupported layout {obj}/{fmt}")
        if fld not in ("pattern", "integer", "real"):
            raise GraphFormatError(f"unsupported field {fld!r}")
        if sym not in ("symmetric", "general"):
            raise GraphFormatError(f"unsupported symmetry {sym!r}")
        weighted = fld != "pattern"

        size_line = ""
        for line in stream:
            s = line.strip()
            if s and not s.startswith("%"):
                size_line = s
                break
        if not size_line:
            raise GraphFormatError("missing size line")
        toks = size_line.split()
        if len(toks) != 3:
            raise GraphFormatError(f"bad size line: {size_line!r}")
        try:
            rows, cols, nnz = int(toks[0]), int(toks[1]), int(toks[2])
        except ValueError as exc:
            raise GraphFormatError(f"bad size line: {size_line!r}") from exc
        if rows != cols:
            raise GraphFormatError(f"adjacency matrix must be square, got {rows}x{cols}")
        if rows > _MAX_VERTICES:
            raise GraphFormatError(f"{rows} vertices exceeds the supported maximum")
        _check_budget(
            estimate_graph_bytes(rows, nnz, weighted), memory_budget, "matrix"
        )

        us = np.empty(nnz, dtype=np.int64)
        vs = np.empty(nnz, dtype=np.int64)
        ws = np.empty(nnz, dtype=np.float64) if weighted else None
        k = 0
        want = 3 if weighted else 2
        for line in stream:
            s = line.strip()
            if not s or s.startswith("%"):
                continue
            toks = s.split()
            if len(toks) < want:
                raise GraphFormatError(f"entry line too short: {s!r}")
            if k >= nnz:
                raise GraphFormatError("more entries than the size line declared")
            try:
                i, j = int(toks[0]), int(toks[1])
            except ValueError as exc:
                raise GraphFormatError(f"bad entry line: {s!r}") from exc
            if not (1 <= i <= rows and 1 <= j <= rows):
                raise GraphFormatError(f"entry ({i},{j}) outside 1..{rows}")
            us[k] = i - 1
            vs[k] = j - 1
            if weighted:
                try:
                    val = float(toks[2])
                except ValueError as exc:
                    raise GraphFormatError(f"bad value in line: {s!r}") from exc
                if not (val > 0) or not np.isfinite(val):
                    raise GraphFormatError(f"nonpositive weight in line: {s!r}")
                ws[k] = val
            k += 1
        if k != nnz:
            raise GraphFormatError(f"size line declared {nnz} entries, found {k}")

        graph, report = from_edges(us, vs, ws, n=rows, memory_budget=memory_budget)
        report.labels = np.arange(1, rows + 1, dtype=np.int64)
        return graph, report
    finally:
        if owned:
            stream.close()


def load_edge_list(
    source: Union[str, Path, IO],
    weighted: bool | None = None,
    memory_budget: int | None = None,
) -> tuple[Graph, LoadReport]:
    """Parse whitespace-separated ``u v [w]`` lines as an undirected graph.

    Lines starting with ``#`` or ``%`` are comments.  Vertex ids are arbitrary
    integers, compacted to ``0..n-1`` in order of first appearance; the report's
    ``labels`` array maps internal ids back.  ``weighted=None`` infers from the
    first data line; passing True/False enforces the column count.  Isolated
    vertices cannot be expressed in this format.
    """
    stream, owned = _open_text(source)
    try:
        us: list[int] = []
        vs: list[int] = []
        ws: list[float] = []
        label_of: dict[int, int] = {}

        def intern(label: int) -> int:
            idx = label_of.get(label)
            if idx is None:
                idx = len(label_of)
                label_of[label] = idx
            return idx

        for line in stream:
            s = line.strip()
            if not s or s[0] in "#%":
                continue
            toks = s.split()
            if len(toks) < 2:
                raise GraphFormatError(f"edge line too short: {s!r}")
            has_w = len(toks) >= 3
            if weighted is None:
                weighted = has_w
            if weighted and not has_w:
                raise GraphFormatError(f"missing weight column in line: {s!r}")
            if not weighted and has_w:
                raise GraphFormatError(f"unexpected extra column in line: {s!r}")
            try:
                a, b = int(toks[0]), int(toks[1])
            except ValueError as exc:
                raise GraphFormatError(f"bad vertex id in line: {s!r}") from exc
            us.append(intern(a))
            vs.append(intern(b))
            if weighted:
                try:
                    val = float(toks[2])
                except ValueError as exc:
                    raise GraphFormatError(f"bad weight in line: {s!r}") from exc
                if not (val > 0) or not np.isfinite(val):
                    raise GraphFormatError(f"nonpositive weight in line: {s!r}")
                ws.append(val)

        n = len(label_of)
        graph, report = from_edges(
            np.array(us, dtype=np.int64),
            np.array(vs, dtype=np.int64),
            np.array(ws, dtype=np.float64) if weighted else None,
            n=n,
            memory_budget=memory_budget,
        )
        report.labels = np.fromiter(label_of.keys(), dtype=np.int64, count=n)
        return graph, report
    finally:
        if owned:
            stream.close()


def to_edge_list(
    graph: Graph, sink: Union[str, Path, IO], labels: np.ndarray | None = None
) -> None:
    """Write one ``u v [w]`` line per edge (u < v in emitted label order).

    ``labels`` defaults to 1-based ids.  Weights round-trip exactly through
    ``repr``.  Isolated vertices are not representable and are silently lost.
    """
    if labels is None:
        labels = np.arange(1, graph.n + 1, dtype=np.int64)
    out, owned = (open(sink, "w", encoding="utf-8"), True) if isinstance(
        sink, (str, Path)
    ) else (sink, False)
    try:
        eu, ev, ew = graph.edge_arrays()
        if ew is None:
            for a, b in zip(labels[eu], labels[ev]):
                out.write(f"{a} {b}\n")
        else:
            for a, b, wv in zip(labels[eu], labels[ev], ew):
                out.write(f"{a} {b} {float(wv)!r}\n")
    finally:
        if owned:
            out.close()


def density(graph: Graph) -> Density:
    """Whole-graph density: edge count (or total weight) over vertex count."""
    if graph.n == 0:
        raise ValueError("density of an empty graph is undefined")
    if graph.weights is None:
        return Fraction(graph.m, graph.n)
    return graph.total_weight / graph.n


def _member_array(graph: Graph, members) -> np.ndarray:
    if isinstance(members, np.ndarray) and members.dtype.kind in "iu":
        arr = np.unique(members.astype(np.int64, copy=False))
    else:
        arr = np.unique(np.fromiter((int(x) for x in members), dtype=np.int64))
    if arr.size == 0:
        raise ValueError("vertex set is empty")
    if arr[0] < 0 or arr[-1] >= graph.n:
        raise ValueError("vertex id out of range")
    return arr


def set_density(graph: Graph, members) -> Density:
    """Density of the subgraph induced by ``members`` (any iterable of ids)."""
    arr = _member_array(graph, members)
    mask = np.zeros(graph.n, dtype=np.bool_)
    mask[arr] = True
    cnt2, wsum2 = _induced_stats(
        graph.offsets,
        graph.neighbors,
        graph.weights if graph.weights is not None else _EMPTY_F64,
        graph.weights is not None,
        arr,
        mask,
    )
    if graph.weights is None:
        return Fraction(int(cnt2), 2 * int(arr.size))
    return (wsum2 / 2.0) / arr.size


def induced_subgraph(graph: Graph, members) -> tuple[Graph, np.ndarray]:
    """Subgraph induced by ``members`` plus the old-id -> new-id mapping.

    The mapping is an array of length ``graph.n`` with -1 for vertices outside
    the set; members (in ascending id order) map to ``0..k-1``.
    """
    arr = _member_array(graph, members)
    mask = np.zeros(graph.n, dtype=np.bool_)
    mask[arr] = True
    newid = np.full(graph.n, -1, dtype=np.int64)
    newid[arr] = np.arange(arr.size, dtype=np.int64)
    has_w = graph.weights is not None
    cnt2, _ = _induced_stats(
        graph.offsets,
        graph.neighbors,
        graph.weights if has_w else _EMPTY_F64,
        has_w,
        arr,
        mask,
    )
    eu, ev, ew = _collect_induced(
        graph.offsets,
        graph.neighbors,
        graph.weights if has_w else _EMPTY_F64,
        has_w,
        arr,
        mask,
        newid,
        int(cnt2) // 2,
    )
    sub = _csr_from_clean(int(arr.size), eu, ev, ew if has_w else None)
    return sub, newid


def _check_invariants(graph: Graph) -> None:
    """Assert the structural contract; test helper, not a hot path."""
    assert graph.offsets.shape == (graph.n + 1,)
    assert graph.offsets[0] == 0 and graph.offsets[-1] == 2 * graph.m
    assert graph.neighbors.shape == (2 * graph.m,)
    seen = {}
    for v in range(graph.n):
        row = graph.neighbors[graph.offsets[v] : graph.offsets[v + 1]]
        assert np.all(row[:-1] < row[1:]), f"row {v} not strictly sorted"
        assert not np.any(row == v), f"self-loop at {v}"
        for j, u in enumerate(row):
            w = graph.weights[graph.offsets[v] + j] if graph.weights is not None else 1
            seen[(v, int(u))] = w
    for (a, b), w in seen.items():
        assert (b, a) in seen and seen[(b, a)] == w, f"edge ({a},{b}) not symmetric"
    if graph.weights is None:
        assert graph.total_weight == float(graph.m)
    else:
        assert abs(graph.total_weight - graph.weights.sum() / 2.0) < 1e-6 * max(
            1.0, graph.total_weight
        )
