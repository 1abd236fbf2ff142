"""Push-relabel max-flow on paired-arc networks, plus the density test network.

Arcs are stored in pairs: arc ``j`` and ``j ^ 1`` are each other's reverses,
and a push along ``j`` moves capacity to ``j ^ 1``.  Capacities are float64 in
general; networks built from an exact rational density guess carry integer
(int64) capacities scaled by the guess's denominator, making the min-cut
decision exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

import numpy as np
from numba import njit

from .graph import Graph, MemoryBudgetError


@dataclass
class FlowNetwork:
    """Directed network with paired residual arcs in CSR layout.

    ``arc_ids`` groups arc ids by tail node (``head[v]:head[v+1]`` slices);
    ``arc_to[j]`` and ``cap[j]`` give each arc's head and residual capacity.
    ``cap`` is mutated by flow runs; ``base_cap`` keeps the pristine
    capacities.  ``scale`` records the integer factor applied to all
    capacities when the network was built from a rational guess (1 otherwise).
    """

    num_nodes: int
    source: int
    sink: int
    head: np.ndarray
    arc_ids: np.ndarray
    arc_to: np.ndarray
    cap: np.ndarray
    base_cap: np.ndarray
    scale: int = 1
    # set by build_goldberg_network: forward arc id of v->t, per original vertex
    t_arc: np.ndarray | None = field(default=None, repr=False)

    def reset(self) -> None:
        np.copyto(self.cap, self.base_cap)

    @property
    def num_arcs(self) -> int:
        return int(self.arc_to.size)


@dataclass
class CutResult:
    """Max-flow value and the minimal source-side cut certificate.

    ``flow_value`` is in the network's own capacity units (divide by
    ``scale`` to undo rational-guess scaling).  ``source_side`` lists the
    nodes, excluding the source and sink themselves, reachable from the source
    in the final residual network; it is the inclusion-minimal min cut side.
    """

    flow_value: float
    source_side: np.ndarray


def from_pairs(
    num_nodes: int,
    tails: np.ndarray,
    heads: np.ndarray,
    caps: np.ndarray,
    source: int,
    sink: int,
    rev_caps: np.ndarray | None = None,
) -> FlowNetwork:
    """Assemble a network from directed capacity arcs (reverse caps default 0)."""
    tails = np.asarray(tails, dtype=np.int64)
    heads_a = np.asarray(heads, dtype=np.int64)
    k = tails.size
    caps = np.asarray(caps)
    if rev_caps is None:
        rev_caps = np.zeros(k, dtype=caps.dtype)
    arc_to = np.empty(2 * k, dtype=np.int32)
    cap = np.empty(2 * k, dtype=caps.dtype)
    arc_to[0::2] = heads_a
    arc_to[1::2] = tails
    cap[0::2] = caps
    cap[1::2] = rev_caps
    tail_of = np.empty(2 * k, dtype=np.int64)
    tail_of[0::2] = tails
    tail_of[1::2] = heads_a
    counts = np.bincount(tail_of, minlength=num_nodes)
    head = np.zeros(num_nodes + 1, dtype=np.int64)
    np.cumsum(counts, out=head[1:])
    order = np.argsort(tail_of, kind="stable")
    arc_ids = order.astype(np.int32)
    return FlowNetwork(
        num_nodes=num_nodes,
        source=source,
        sink=sink,
        head=head,
        arc_ids=arc_ids,
        arc_to=arc_to,
        cap=cap,
        base_cap=cap.copy(),
    )


def estimate_network_bytes(graph: Graph) -> int:
    """Projected size of the density test network for ``graph``."""
    pairs = graph.m + 2 * graph.n
    # arc_to(4) + arc_ids(4) + cap(8) + base_cap(8) per arc record, 2 per pair
    return 2 * pairs * 24 + (graph.n + 3) * 8


def build_goldberg_network(
    graph: Graph,
    g: Union[float, Fraction],
    memory_budget: int | None = None,
) -> FlowNetwork:
    """Auxiliary network whose min cut decides whether some set beats density g.

    With ``W`` the total edge weight: source->v arcs of capacity W, one
    paired arc per edge carrying the edge weight in both directions, and
    v->sink arcs of capacity ``W + 2g - deg_w(v)`` (nonnegative because no
    vertex's weighted degree exceeds W).  A cut ``{s} | A`` costs
    ``n*W + 2*(g*|A| - w(E(A)))``, so the min cut leaves a nonempty source
    side exactly when some set has density above g.

    Passing ``g`` as a :class:`~fractions.Fraction` on an unweighted or
    integer-weighted graph builds an integer network with all capacities
    scaled by ``g.denominator``, making the decision exact.
    """
    n, m = graph.n, graph.m
    if n == 0:
        raise ValueError("empty graph")
    est = estimate_network_bytes(graph)
    if memory_budget is not None and est > memory_budget:
        raise MemoryBudgetError(
            f"flow network needs ~{est} bytes (budget {memory_budget})", est
        )
    s, t = n, n + 1
    eu, ev, ew = graph.edge_arrays()
    wdeg = graph.weighted_degrees()

    exact = isinstance(g, Fraction) and (not graph.weighted or graph.integral_weights)
    k = m + 2 * n
    tails = np.empty(k, dtype=np.int64)
    heads = np.empty(k, dtype=np.int64)
    tails[:m] = eu
    heads[:m] = ev
    tails[m : m + n] = s
    heads[m : m + n] = np.arange(n)
    tails[m + n :] = np.arange(n)
    heads[m + n :] = t

    if exact:
        den = g.denominator
        num = g.numerator
        w_total = int(round(graph.total_weight))
        caps = np.empty(k, dtype=np.int64)
        rev = np.zeros(k, dtype=np.int64)
        if graph.weighted:
            we = np.rint(ew).astype(np.int64) * den
        else:
            we = np.full(m, den, dtype=np.int64)
        caps[:m] = we
        rev[:m] = we
        caps[m : m + n] = w_total * den
        caps[m + n :] = w_total * den + 2 * num - np.rint(wdeg).astype(np.int64) * den
        scale = den
    else:
        gf = float(g)
        w_total = float(graph.total_weight)
        caps = np.empty(k, dtype=np.float64)
        rev = np.zeros(k, dtype=np.float64)
        we_f = ew if graph.weighted else np.ones(m, dtype=np.float64)
        caps[:m] = we_f
        rev[:m] = we_f
        caps[m : m + n] = w_total
        caps[m + n :] = w_total + 2.0 * gf - wdeg
        scale = 1
    if np.any(caps[m + n :] < 0):
        raise ValueError("negative sink capacity: density guess below its valid range")

    net = from_pairs(n + 2, tails, heads, caps, s, t, rev_caps=rev)
    net.scale = scale
    net.t_arc = (2 * np.arange(m + n, k, dtype=np.int64)).astype(np.int64)
    return net


@njit(cache=True, nogil=True)
def _residual_bfs_heights(head, arc_ids, arc_to, cap, root, skip, height, queue, tol):
    """height[v] = residual-graph distance from v to root (unreached: N+1)."""
    n = head.size - 1
    for v in range(n):
        height[v] = n + 1
    height[root] = 0
    queue[0] = root
    qh, qt = 0, 1
    while qh < qt:
        w = queue[qh]
        qh += 1
        dw = height[w]
        for idx in range(head[w], head[w + 1]):
            j = arc_ids[idx]
            u = arc_to[j]
            # residual arc u->w exists iff the pair partner has capacity
            if cap[j ^ 1] > tol and u != skip and height[u] == n + 1:
                height[u] = dw + 1
                queue[qt] = u
                qt += 1


@njit(cache=True, nogil=True)
def _reachable_from(head, arc_ids, arc_to, cap, root, tol):
    n = head.size - 1
    reach = np.zeros(n, dtype=np.bool_)
    queue = np.empty(n, dtype=np.int32)
    reach[root] = True
    queue[0] = root
    qh, qt = 0, 1
    while qh < qt:
        v = queue[qh]
        qh += 1
        for idx in range(head[v], head[v + 1]):
            j = arc_ids[idx]
            w = arc_to[j]
            if cap[j] > tol and not reach[w]:
                reach[w] = True
                queue[qt] = w
                qt += 1
    return reach


@njit(cache=True, nogil=True)
def _pr_phase(head, arc_ids, arc_to, cap, excess, height, cur, target, other, phase1, tol):
    """Discharge until no active node remains.

    Phase 1 (``phase1`` true): target is the sink; nodes lifted to height >= N
    park their excess.  Phase 2: target is the source, nothing parks, and the
    run drains every non-terminal excess back.
    """
    n = head.size - 1
    inf_h = np.int32(2 * n + 2)
    queue = np.empty(n, dtype=np.int32)

    _residual_bfs_heights(head, arc_ids, arc_to, cap, target, other, height, queue, tol)
    height[other] = np.int32(n) if phase1 else inf_h
    height[target] = 0

    cnt = np.zeros(2 * n + 3, dtype=np.int64)
    for v in range(n):
        if v != other and height[v] <= n:
            cnt[height[v]] += 1
    for v in range(n):
        cur[v] = head[v]

    bucket_head = np.full(2 * n + 3, -1, dtype=np.int64)
    bucket_next = np.full(n, -1, dtype=np.int64)
    queued = np.zeros(n, dtype=np.bool_)
    hi = np.int64(-1)

    park_h = np.int64(n) if phase1 else np.int64(2 * n + 2)

    for v in range(n):
        if v != target and v != other and excess[v] > tol and height[v] < park_h:
            bucket_next[v] = bucket_head[height[v]]
            bucket_head[height[v]] = v
            queued[v] = True
            if height[v] > hi:
                hi = height[v]

    relabels = np.int64(0)
    while hi >= 0:
        while hi >= 0 and bucket_head[hi] < 0:
            hi -= 1
        if hi < 0:
            break
        v = bucket_head[hi]
        bucket_head[hi] = bucket_next[v]
        queued[v] = False
        if excess[v] <= tol or height[v] >= park_h or height[v] != hi:
            # stale entry: re-file if still active at another height
            if excess[v] > tol and height[v] < park_h and not queued[v]:
                bucket_next[v] = bucket_head[height[v]]
                bucket_head[height[v]] = v
                queued[v] = True
                if height[v] > hi:
                    hi = height[v]
            continue
        while excess[v] > tol:
            if cur[v] >= head[v + 1]:
                # arcs exhausted: relabel
                old_h = height[v]
                new_h = inf_h
                for idx in range(head[v], head[v + 1]):
                    j = arc_ids[idx]
                    if cap[j] > tol:
                        hw = height[arc_to[j]]
                        if hw + 1 < new_h:
                            new_h = hw + 1
                cur[v] = head[v]
                cnt[old_h] -= 1
                height[v] = new_h
                if new_h <= 2 * n + 2:
                    cnt[new_h] += 1
                relabels += 1
                if phase1 and cnt[old_h] == 0 and old_h < n:
                    # gap: heights strictly between old_h and N are unreachable
                    for u in range(n):
                        if u != other and old_h < height[u] < n:
                            cnt[height[u]] -= 1
                            height[u] = np.int32(n + 1)
                if height[v] >= park_h:
                    break
                if relabels >= n:
                    relabels = 0
                    _residual_bfs_heights(
                        head, arc_ids, arc_to, cap, target, other, height, queue, tol
                    )
                    height[other] = np.int32(n) if phase1 else inf_h
                    height[target] = 0
                    for u in range(2 * n + 3):
                        cnt[u] = 0
                        bucket_head[u] = -1
                    for u in range(n):
                        if u != other and height[u] <= n:
                            cnt[height[u]] += 1
                        cur[u] = head[u]
                        queued[u] = False
                    hi = -1
                    for u in range(n):
                        if (
                            u != target
                            and u != other
                            and excess[u] > tol
                            and height[u] < park_h
                        ):
                            bucket_next[u] = bucket_head[height[u]]
                            bucket_head[height[u]] = u
                            queued[u] = True
                            if height[u] > hi:
                                hi = height[u]
                    break
            else:
                j = arc_ids[cur[v]]
                w = arc_to[j]
                if cap[j] > tol and height[v] == height[w] + 1:
                    delta = excess[v] if excess[v] < cap[j] else cap[j]
                    cap[j] -= delta
                    cap[j ^ 1] += delta
                    excess[v] -= delta
                    excess[w] += delta
                    if (
                        w != target
                        and w != other
                        and height[w] < park_h
                        and not queued[w]
                        and excess[w] > tol
                    ):
                        bucket_next[w] = bucket_head[height[w]]
                        bucket_head[height[w]] = w
                        queued[w] = True
                        if height[w] > hi:
                            hi = height[w]
                else:
                    cur[v] += 1
        if excess[v] > tol and height[v] < park_h and not queued[v]:
            bucket_next[v] = bucket_head[height[v]]
            bucket_head[height[v]] = v
            queued[v] = True
            if height[v] > hi:
                hi = height[v]


@njit(cache=True, nogil=True)
def _pr_run(head, arc_ids, arc_to, cap, excess, s, t, tol):
    n = head.size - 1
    height = np.empty(n, dtype=np.int32)
    cur = np.empty(n, dtype=np.int64)
    # saturate every source arc to form the initial preflow
    for idx in range(head[s], head[s + 1]):
        j = arc_ids[idx]
        c = cap[j]
        if c > tol:
            cap[j] = 0
            cap[j ^ 1] += c
            excess[arc_to[j]] += c
            excess[s] -= c
    _pr_phase(head, arc_ids, arc_to, cap, excess, height, cur, t, s, True, tol)
    flow = excess[t]
    _pr_phase(head, arc_ids, arc_to, cap, excess, height, cur, s, t, False, tol)
    return flow


def max_flow_push_relabel(net: FlowNetwork) -> CutResult:
    """Exact max flow with the minimal source-side min-cut certificate.

    Runs highest-label push-relabel with gap and periodic global relabeling,
    converts the max preflow into a flow, then reports the nodes still
    reachable from the source in the residual network.  Integer-capacity
    networks run fully exactly; float networks treat capacities and excesses
    within ``sum(caps) * 2**-44`` of zero as zero, since returning excess
    across saturating arcs cannot cancel to exactly 0.0.
    """
    if net.cap.dtype.kind in "iu":
        tol = 0.0
    else:
        tol = float(net.base_cap.sum()) * 2.0**-44
    excess = np.zeros(net.num_nodes, dtype=net.cap.dtype)
    flow = _pr_run(
        net.head, net.arc_ids, net.arc_to, net.cap, excess, net.source, net.sink, tol
    )
    check = np.abs(excess)
    check[net.source] = 0
    check[net.sink] = 0
    if np.any(check > tol):
        raise AssertionError("flow conversion left stranded excess")
    reach = _reachable_from(
        net.head, net.arc_ids, net.arc_to, net.cap, net.source, tol
    )
    side = np.flatnonzero(reach)
    side = side[(side != net.source) & (side != net.sink)]
    return CutResult(flow_value=float(flow), source_side=side.astype(np.int64))
