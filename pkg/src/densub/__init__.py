"""Densest-subgraph extraction toolkit.

Finds a vertex set S maximizing the density |E(S)|/|S| (or its weighted
analogue) in a simple undirected graph.  Three routes are provided:

* :func:`densub.peel.peel` -- linear-time greedy peeling, a 2-approximation;
* :func:`densub.exact.densest_exact` -- exact maximum-density set via binary
  search over min-cut computations on an auxiliary flow network;
* :func:`densub.hybrid.run_hybrid` -- peel, expand the peel answer by one
  neighborhood ring, then solve exactly on that small core.

Graphs are immutable CSR structures built by the loaders in
:mod:`densub.graph`; synthetic families and a brute-force oracle live in
:mod:`densub.instances`.
"""

from .graph import (
    DenseSet,
    Graph,
    GraphFormatError,
    LoadReport,
    MemoryBudgetError,
    density,
    induced_subgraph,
    load_edge_list,
    load_matrix_market,
    set_density,
    to_edge_list,
)
from .peel import PeelResult, peel, peel_unweighted, peel_weighted
from .maxflow import CutResult, FlowNetwork, build_goldberg_network, max_flow_push_relabel
from .exact import ExactResult, densest_exact
from .hybrid import ExpansionResult, HybridResult, expand, predict_expansion_size, run_hybrid
from .instances import (
    brute_force_densest,
    gen_demo,
    gen_random,
    gen_worstcase,
    worstcase_ratio,
)
from .lp import LpSummary, emit_charikar_lp
from .bench import BenchRecord, compute_gap

__version__ = "0.1.0"

__all__ = [
    "Graph",
    "DenseSet",
    "LoadReport",
    "GraphFormatError",
    "MemoryBudgetError",
    "load_matrix_market",
    "load_edge_list",
    "to_edge_list",
    "density",
    "set_density",
    "induced_subgraph",
    "PeelResult",
    "peel",
    "peel_unweighted",
    "peel_weighted",
    "FlowNetwork",
    "CutResult",
    "build_goldberg_network",
    "max_flow_push_relabel",
    "ExactResult",
    "densest_exact",
    "ExpansionResult",
    "HybridResult",
    "expand",
    "predict_expansion_size",
    "run_hybrid",
    "gen_worstcase",
    "worstcase_ratio",
    "gen_random",
    "gen_demo",
    "brute_force_densest",
    "LpSummary",
    "emit_charikar_lp",
    "BenchRecord",
    "compute_gap",
    "__version__",
]
