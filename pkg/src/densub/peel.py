"""Greedy peeling: repeatedly remove a minimum-degree vertex, keep the best suffix.

The returned set is a 2-approximation of the maximum-density set.  The
unweighted path runs in O(n + m) time using FIFO degree buckets; the weighted
path uses a lazy-deletion binary heap, O(m log n).  Tie-breaking is fixed and
documented so runs are reproducible: buckets are FIFO (head removed, degree-
decremented vertices re-append at the tail; initial fill in id order), and the
weighted heap orders by (weighted degree, vertex id).
"""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from numba import njit

from .graph import DenseSet, Density, Graph, set_density


@dataclass
class PeelResult:
    """Outcome of a full peel.

    ``order[i]`` is the i-th vertex removed; the best suffix is
    ``order[best_suffix_start:]`` and ``best`` is that suffix as a
    :class:`DenseSet`.  ``moves`` counts bucket placements (unweighted) or heap
    pushes (weighted); the unweighted count is at most ``n + m``.
    """

    order: np.ndarray
    best: DenseSet
    best_suffix_start: int
    moves: int
    elapsed_ms: float


class DegreeLists:
    """FIFO buckets of live vertices keyed by current degree.

    Array-backed doubly-linked lists: O(1) removal of the head of the lowest
    nonempty bucket and O(1) relocation of a vertex whose degree dropped by
    one.  ``moves`` counts placements; a full peel performs at most ``n + m``
    of them (one initial placement per vertex, at most one relocation per
    edge).  This is the readable reference; the compiled kernel below mirrors
    it operation for operation.
    """

    def __init__(self, degrees: np.ndarray):
        n = len(degrees)
        maxdeg = int(degrees.max()) if n else 0
        self.deg = [int(d) for d in degrees]
        self.head = [-1] * (maxdeg + 1)
        self.tail = [-1] * (maxdeg + 1)
        self.nxt = [-1] * n
        self.prv = [-1] * n
        self.live = [True] * n
        self.cur_min = 0
        self.moves = 0
        for v in range(n):
            self._append(v, self.deg[v])

    def _append(self, v: int, d: int) -> None:
        self.prv[v] = self.tail[d]
        self.nxt[v] = -1
        if self.tail[d] >= 0:
            self.nxt[self.tail[d]] = v
        else:
            self.head[d] = v
        self.tail[d] = v
        self.moves += 1

    def _unlink(self, v: int) -> None:
        d = self.deg[v]
        p, q = self.prv[v], self.nxt[v]
        if p >= 0:
            self.nxt[p] = q
        else:
            self.head[d] = q
        if q >= 0:
            self.prv[q] = p
        else:
            self.tail[d] = p

    def pop_min(self) -> int:
        while self.head[self.cur_min] < 0:
            self.cur_min += 1
        v = self.head[self.cur_min]
        self._unlink(v)
        self.live[v] = False
        return v

    def decrease(self, v: int) -> None:
        self._unlink(v)
        self.deg[v] -= 1
        self._append(v, self.deg[v])
        if self.deg[v] < self.cur_min:
            self.cur_min = self.deg[v]

    def bucket_of(self, v: int) -> int:
        """Current bucket index of a live vertex (for invariant checks)."""
        return self.deg[v]


def _peel_reference(graph: Graph) -> tuple[list[int], int]:
    """Pure-Python unweighted peel; used to cross-check the compiled kernel."""
    n = graph.n
    lists = DegreeLists(graph.degrees())
    order: list[int] = []
    rem_e = graph.m
    best_e, best_s, best_start = 0, 1, n - 1  # density 0 fallback
    for i in range(n):
        size = n - i
        if rem_e * best_s > best_e * size:
            best_e, best_s, best_start = rem_e, size, i
        v = lists.pop_min()
        order.append(v)
        for u in graph.neighbors[graph.offsets[v] : graph.offsets[v + 1]]:
            u = int(u)
            if lists.live[u]:
                lists.decrease(u)
                rem_e -= 1
    return order, best_start


@njit(cache=True, nogil=True)
def _peel_unweighted_kernel(offsets, neighbors):
    n = offsets.size - 1
    deg = np.empty(n, dtype=np.int64)
    maxdeg = np.int64(0)
    for v in range(n):
        deg[v] = offsets[v + 1] - offsets[v]
        if deg[v] > maxdeg:
            maxdeg = deg[v]
    head = np.full(maxdeg + 1, -1, dtype=np.int64)
    tail = np.full(maxdeg + 1, -1, dtype=np.int64)
    nxt = np.full(n, -1, dtype=np.int64)
    prv = np.full(n, -1, dtype=np.int64)
    live = np.ones(n, dtype=np.bool_)
    moves = np.int64(0)
    for v in range(n):
        d = deg[v]
        prv[v] = tail[d]
        if tail[d] >= 0:
            nxt[tail[d]] = v
        else:
            head[d] = v
        tail[d] = v
        moves += 1

    order = np.empty(n, dtype=np.int32)
    rem_e = np.int64(neighbors.size // 2)
    best_e = np.int64(0)
    best_s = np.int64(1)
    best_start = n - 1
    cur_min = np.int64(0)
    for i in range(n):
        size = np.int64(n - i)
        if rem_e * best_s > best_e * size:
            best_e, best_s, best_start = rem_e, size, i
        while head[cur_min] < 0:
            cur_min += 1
        v = head[cur_min]
        # unlink head
        q = nxt[v]
        head[cur_min] = q
        if q >= 0:
            prv[q] = -1
        else:
            tail[cur_min] = -1
        live[v] = False
        order[i] = v
        for j in range(offsets[v], offsets[v + 1]):
            u = neighbors[j]
            if live[u]:
                d = deg[u]
                p, q = prv[u], nxt[u]
                if p >= 0:
                    nxt[p] = q
                else:
                    head[d] = q
                if q >= 0:
                    prv[q] = p
                else:
                    tail[d] = p
                d -= 1
                deg[u] = d
                prv[u] = tail[d]
                nxt[u] = -1
                if tail[d] >= 0:
                    nxt[tail[d]] = u
                else:
                    head[d] = u
                tail[d] = u
                moves += 1
                if d < cur_min:
                    cur_min = d
                rem_e -= 1
    return order, best_start, best_e, moves


@njit(cache=True, nogil=True)
def _peel_weighted_kernel(offsets, neighbors, weights):
    n = offsets.size - 1
    m = neighbors.size // 2
    wdeg = np.zeros(n, dtype=np.float64)
    total = 0.0
    for v in range(n):
        s = 0.0
        for j in range(offsets[v], offsets[v + 1]):
            s += weights[j]
        wdeg[v] = s
        total += s
    rem_w = total / 2.0

    cap = n + m + 1
    hkey = np.empty(cap, dtype=np.float64)
    hid = np.empty(cap, dtype=np.int64)
    hsize = 0
    pushes = np.int64(0)

    # binary heap ordered by (key, id); lazy deletion via stale-key check
    for v in range(n):
        hkey[hsize] = wdeg[v]
        hid[hsize] = v
        i = hsize
        hsize += 1
        pushes += 1
        while i > 0:
            p = (i - 1) // 2
            if hkey[i] < hkey[p] or (hkey[i] == hkey[p] and hid[i] < hid[p]):
                hkey[i], hkey[p] = hkey[p], hkey[i]
                hid[i], hid[p] = hid[p], hid[i]
                i = p
            else:
                break

    live = np.ones(n, dtype=np.bool_)
    order = np.empty(n, dtype=np.int32)
    best_d = -1.0
    best_start = n - 1
    for i in range(n):
        size = n - i
        cand = rem_w / size
        if cand > best_d:
            best_d = cand
            best_start = i
        v = -1
        while hsize > 0:
            top = hid[0]
            key = hkey[0]
            # pop root, sift down
            hsize -= 1
            hkey[0] = hkey[hsize]
            hid[0] = hid[hsize]
            k = 0
            while True:
                l = 2 * k + 1
                r = l + 1
                sm = k
                if l < hsize and (
                    hkey[l] < hkey[sm] or (hkey[l] == hkey[sm] and hid[l] < hid[sm])
                ):
                    sm = l
                if r < hsize and (
                    hkey[r] < hkey[sm] or (hkey[r] == hkey[sm] and hid[r] < hid[sm])
                ):
                    sm = r
                if sm == k:
                    break
                hkey[k], hkey[sm] = hkey[sm], hkey[k]
                hid[k], hid[sm] = hid[sm], hid[k]
                k = sm
            if live[top] and key == wdeg[top]:
                v = top
                break
        live[v] = False
        order[i] = v
        for j in range(offsets[v], offsets[v + 1]):
            u = neighbors[j]
            if live[u]:
                w = weights[j]
                wdeg[u] -= w
                rem_w -= w
                hkey[hsize] = wdeg[u]
                hid[hsize] = u
                k = hsize
                hsize += 1
                pushes += 1
                while k > 0:
                    p = (k - 1) // 2
                    if hkey[k] < hkey[p] or (hkey[k] == hkey[p] and hid[k] < hid[p]):
                        hkey[k], hkey[p] = hkey[p], hkey[k]
                        hid[k], hid[p] = hid[p], hid[k]
                        k = p
                    else:
                        break
    return order, best_start, pushes


def _peel_weighted_reference(graph: Graph) -> tuple[list[int], int]:
    """heapq-based weighted peel mirroring the kernel's tie-breaking."""
    n = graph.n
    wdeg = graph.weighted_degrees()
    rem_w = graph.total_weight
    heap = [(float(wdeg[v]), v) for v in range(n)]
    heapq.heapify(heap)
    live = [True] * n
    order: list[int] = []
    best_d, best_start = -1.0, n - 1
    for i in range(n):
        cand = rem_w / (n - i)
        if cand > best_d:
            best_d, best_start = cand, i
        while True:
            key, v = heapq.heappop(heap)
            if live[v] and key == wdeg[v]:
                break
        live[v] = False
        order.append(v)
        s, e = graph.offsets[v], graph.offsets[v + 1]
        for u, w in zip(graph.neighbors[s:e], graph.weights[s:e]):
            u = int(u)
            if live[u]:
                wdeg[u] -= w
                rem_w -= w
                heapq.heappush(heap, (float(wdeg[u]), u))
    return order, best_start


def _result(
    graph: Graph,
    order: np.ndarray,
    best_start: int,
    best_e: int | None,
    moves: int,
    elapsed_ms: float,
) -> PeelResult:
    if graph.m == 0:
        # no edges anywhere: report the last single vertex, density 0
        best_start = graph.n - 1
        best_e = 0
    members = np.sort(order[best_start:].astype(np.int64))
    d: Density
    if graph.weights is None:
        d = Fraction(int(best_e), int(members.size))
    else:
        d = float(set_density(graph, members))
    return PeelResult(
        order=order,
        best=DenseSet(members=members, density=d, source="greedy"),
        best_suffix_start=int(best_start),
        moves=int(moves),
        elapsed_ms=elapsed_ms,
    )


def peel_unweighted(graph: Graph) -> PeelResult:
    """Greedy peel of an unweighted graph; exact rational suffix comparison."""
    if graph.weighted:
        raise ValueError("graph is weighted; use peel_weighted")
    if graph.n == 0:
        raise ValueError("empty graph")
    t0 = time.perf_counter()
    order, best_start, best_e, moves = _peel_unweighted_kernel(
        graph.offsets, graph.neighbors
    )
    elapsed = (time.perf_counter() - t0) * 1e3
    return _result(graph, order, int(best_start), int(best_e), int(moves), elapsed)


def peel_weighted(graph: Graph) -> PeelResult:
    """Greedy peel by minimum weighted degree.

    Suffix densities are tracked with running float sums (no compensation); the
    reported density of the chosen suffix is recomputed from scratch.
    """
    if not graph.weighted:
        raise ValueError("graph is unweighted; use peel_unweighted")
    if graph.n == 0:
        raise ValueError("empty graph")
    t0 = time.perf_counter()
    order, best_start, pushes = _peel_weighted_kernel(
        graph.offsets, graph.neighbors, graph.weights
    )
    elapsed = (time.perf_counter() - t0) * 1e3
    return _result(graph, order, int(best_start), None, int(pushes), elapsed)


def peel(graph: Graph) -> PeelResult:
    """Dispatch to the unweighted or weighted peel based on the graph."""
    return peel_weighted(graph) if graph.weighted else peel_unweighted(graph)
