"""Catalyst selection for conditional reliability in uncertain graphs."""

from .errors import GraphFormatError, GuardExceeded, StructuralError
from .estimator import SamplerConfig, evaluate_connectivity, evaluate_reliability, mc_connectivity, mc_reliability
from .graph import EdgeRecord, UncertainGraph, edge_probability, induced_subgraph, world_probability
from .io import derive_count_probability, load_graph, save_graph
from .multi import (
    AggregateQuery,
    ConnectivityQuery,
    connectivity_topk,
    min_catalyst_set,
    topk_avg,
    topk_max,
    topk_min,
)
from .oracle import exact_connectivity, exact_reliability, exhaustive_topk
from .paths import RelPath, build_multigraph, top_r_paths
from .selection import (
    SelectionResult,
    curvature_report,
    greedy_topk,
    individual_topk,
    iterative_path_inclusion,
    rel_path,
)
from .steiner import top_r_steiner_trees

__all__ = [
    "AggregateQuery", "ConnectivityQuery", "EdgeRecord", "GraphFormatError", "GuardExceeded",
    "RelPath", "SamplerConfig", "SelectionResult", "StructuralError", "UncertainGraph",
    "build_multigraph", "connectivity_topk", "curvature_report", "derive_count_probability",
    "edge_probability", "evaluate_connectivity", "evaluate_reliability", "exact_connectivity",
    "exact_reliability", "exhaustive_topk", "greedy_topk", "individual_topk", "induced_subgraph",
    "iterative_path_inclusion", "load_graph", "mc_connectivity", "mc_reliability", "min_catalyst_set",
    "rel_path", "save_graph", "top_r_paths", "top_r_steiner_trees", "topk_avg", "topk_max", "topk_min",
    "world_probability",
]
