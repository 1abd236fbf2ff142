"""Synthetic instance families and a brute-force optimum for small graphs.

The random generator is fully specified here (64-bit LCG, rejection sampling)
so the same ``(n, m, seed)`` triple reproduces the same graph on any platform.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np
from numba import njit

from .graph import DenseSet, Graph, _csr_from_clean

# Knuth's MMIX multiplier/increment for x' = a*x + c mod 2^64.
_LCG_A = np.uint64(6364136223846793005)
_LCG_C = np.uint64(1442695040888963407)


def gen_worstcase(t: int, p: int) -> Graph:
    """Hub-and-pairs family on which greedy peeling approaches its 2-factor.

    Vertex 0 is a hub joined to spokes ``1..t``; vertices ``t+1..t+2p`` form
    ``p`` disjoint matched pairs.  The densest set is the hub plus its spokes,
    density ``t/(t+1)``, while peeling keeps the whole graph at density
    ``(t+p)/(1+t+2p)``; their ratio tends to 2 as t and p/t grow.
    """
    if t < 1 or p < 0:
        raise ValueError("need t >= 1 and p >= 0")
    n = 1 + t + 2 * p
    lo = np.empty(t + p, dtype=np.int64)
    hi = np.empty(t + p, dtype=np.int64)
    lo[:t] = 0
    hi[:t] = np.arange(1, t + 1)
    pair = np.arange(p, dtype=np.int64)
    lo[t:] = t + 1 + 2 * pair
    hi[t:] = t + 2 + 2 * pair
    return _csr_from_clean(n, lo, hi, None)


def worstcase_ratio(t: int, p: int) -> Fraction:
    """Exact optimum-to-greedy density ratio for :func:`gen_worstcase`."""
    if t < 2:
        raise ValueError("ratio formula assumes t >= 2 (unique optimum)")
    if p < 0:
        raise ValueError("need p >= 0")
    return Fraction(t * (1 + t + 2 * p), (t + p) * (t + 1))


@njit(cache=True, nogil=True)
def _sample_edges(n, m, seed, tab_bits):
    a = _LCG_A
    c = _LCG_C
    x = np.uint64(seed)
    x = x * a + c
    size = np.int64(1) << tab_bits
    mask = size - 1
    table = np.full(size, np.int64(-1), dtype=np.int64)
    eu = np.empty(m, dtype=np.int64)
    ev = np.empty(m, dtype=np.int64)
    nn = np.uint64(n)
    count = 0
    while count < m:
        x = x * a + c
        u = np.int64((x >> np.uint64(16)) % nn)
        x = x * a + c
        v = np.int64((x >> np.uint64(16)) % nn)
        if u == v:
            continue
        if u > v:
            u, v = v, u
        key = u * n + v
        # multiplicative-hash open addressing; table load kept under 1/2
        slot = np.int64((np.uint64(key) * np.uint64(0x9E3779B97F4A7C15)) >> np.uint64(40)) & mask
        while table[slot] != -1 and table[slot] != key:
            slot = (slot + 1) & mask
        if table[slot] == key:
            continue
        table[slot] = key
        eu[count] = u
        ev[count] = v
        count += 1
    return eu, ev, x


@njit(cache=True, nogil=True)
def _sample_weights(m, state, wlo, whi, integer):
    a = _LCG_A
    c = _LCG_C
    x = np.uint64(state)
    w = np.empty(m, dtype=np.float64)
    if integer:
        ilo = np.int64(np.ceil(wlo))
        ihi = np.int64(np.floor(whi))
        span = np.uint64(ihi - ilo + 1)
        for i in range(m):
            x = x * a + c
            w[i] = np.float64(ilo + np.int64((x >> np.uint64(16)) % span))
    else:
        scale = whi - wlo
        for i in range(m):
            x = x * a + c
            w[i] = wlo + (np.float64(x >> np.uint64(11)) * 2.0**-53) * scale
    return w


def gen_random(
    n: int,
    m: int,
    seed: int,
    weighted: bool = False,
    weight_low: float = 1.0,
    weight_high: float = 10.0,
    integer_weights: bool = False,
) -> Graph:
    """Uniform simple graph on ``n`` vertices with exactly ``m`` distinct edges.

    Endpoint pairs are drawn from the LCG ``x' = 6364136223846793005*x +
    1442695040888963407 mod 2^64`` (top bits used; modulo bias is below
    ``n/2^48``) and rejected on loops or repeats, so the edge set for a given
    ``(n, m, seed)`` is platform-independent and identical whether or not
    weights are requested.  Weights continue the same stream: uniform in
    ``[weight_low, weight_high)``, or integers in the inclusive rounded range
    when ``integer_weights`` is set.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    maxm = n * (n - 1) // 2
    if not 0 <= m <= maxm:
        raise ValueError(f"m must be in [0, {maxm}] for n={n}")
    weighted = weighted or integer_weights
    if weighted and not weight_low < weight_high:
        raise ValueError("need weight_low < weight_high")
    if weighted and integer_weights and np.floor(weight_high) < np.ceil(weight_low):
        raise ValueError("integer weight range is empty")
    if seed < 0:
        raise ValueError("seed must be nonnegative")
    if m == 0:
        empty = np.empty(0, dtype=np.int64)
        return _csr_from_clean(n, empty, empty, np.empty(0) if weighted else None)
    tab_bits = max(4, int(np.ceil(np.log2(2.5 * m))))
    eu, ev, state = _sample_edges(
        np.int64(n), np.int64(m), np.uint64(seed), np.int64(tab_bits)
    )
    w = None
    if weighted:
        w = _sample_weights(
            np.int64(m),
            np.uint64(state),
            float(weight_low),
            float(weight_high),
            integer_weights,
        )
    return _csr_from_clean(n, eu, ev, w)


_DEMO_EDGES = [
    (0, 1), (1, 4), (1, 2), (2, 5), (2, 3), (3, 6), (4, 7), (7, 6), (6, 5),
    (5, 4), (7, 5), (4, 6), (6, 8), (8, 9), (9, 7), (8, 10), (10, 11),
]


def gen_demo() -> Graph:
    """Hand-sized 12-vertex graph exercising every extraction route.

    It contains a 4-clique ``{4,5,6,7}`` (density 3/2) embedded in a denser
    7-vertex core ``{1..7}`` (density 11/7, the unique optimum), with a short
    tail hanging off.  Peeling alone lands on a 9-vertex suffix of density
    14/9, so the expand-then-solve route visibly improves on it.
    """
    e = np.array(_DEMO_EDGES, dtype=np.int64)
    return _csr_from_clean(12, np.minimum(e[:, 0], e[:, 1]), np.maximum(e[:, 0], e[:, 1]), None)


def brute_force_densest(graph: Graph) -> DenseSet:
    """Exhaustive maximum-density vertex set; reference oracle for small n.

    Enumerates all nonempty subsets, so it is limited to ``n <= 20`` (and is
    only comfortable well below that for weighted graphs).  Ties are broken
    toward smaller sets, then lexicographically smallest membership, making
    the answer unique and deterministic.  Densities are exact rationals for
    unweighted and integral-weight graphs.
    """
    n = graph.n
    if n == 0:
        raise ValueError("empty graph")
    if n > 20:
        raise ValueError("brute force is limited to n <= 20")
    adj = [0] * n
    for v in range(n):
        row = graph.neighbors[graph.offsets[v] : graph.offsets[v + 1]]
        bits = 0
        for u in row:
            bits |= 1 << int(u)
        adj[v] = bits

    use_fraction = (not graph.weighted) or graph.integral_weights
    wmat = None
    if graph.weighted:
        wmat = np.zeros((n, n), dtype=np.float64)
        for v in range(n):
            s, e = graph.offsets[v], graph.offsets[v + 1]
            wmat[v, graph.neighbors[s:e]] = graph.weights[s:e]

    best_d: Fraction | float = Fraction(-1) if use_fraction else -1.0
    best_members: tuple[int, ...] = ()
    for mask in range(1, 1 << n):
        members = []
        sub = mask
        while sub:
            low = sub & -sub
            members.append(low.bit_length() - 1)
            sub ^= low
        size = len(members)
        if graph.weighted:
            wsum2 = 0.0
            for v in members:
                a = adj[v] & mask
                while a:
                    low = a & -a
                    wsum2 += wmat[v, low.bit_length() - 1]
                    a ^= low
            if use_fraction:
                d: Fraction | float = Fraction(int(round(wsum2)), 2 * size)
            else:
                d = wsum2 / (2.0 * size)
        else:
            cnt2 = 0
            for v in members:
                cnt2 += (adj[v] & mask).bit_count()
            d = Fraction(cnt2, 2 * size)
        if d > best_d or (
            d == best_d
            and (size, tuple(members)) < (len(best_members), best_members)
        ):
            best_d = d
            best_members = tuple(members)
    return DenseSet(
        members=np.array(best_members, dtype=np.int64),
        density=best_d,
        source="oracle",
    )
