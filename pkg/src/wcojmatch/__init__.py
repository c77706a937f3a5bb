"""Worst-case optimal join subgraph matching with a modeled AllCompare dataflow."""
from .engine import InstanceConfig, ResultSet, RunStats, run_instance, run_parallel
from .estimator import BruteForceMatcher, SubgraphMatcher
from .graph import CsrGraph, EdgeList, build_csr, load_edge_list, load_graph, make_undirected, stride_map
from .intersect import MemStats, allcompare_intersect, leapfrog_intersect, merge_intersect
from .query import QueryGraph, QueryPlan, default_qvo, enumerate_qvos, parse_query, plan_query

__version__ = "0.1.0"

__all__ = [
    "BruteForceMatcher",
    "CsrGraph",
    "EdgeList",
    "InstanceConfig",
    "MemStats",
    "QueryGraph",
    "QueryPlan",
    "ResultSet",
    "RunStats",
    "SubgraphMatcher",
    "allcompare_intersect",
    "build_csr",
    "default_qvo",
    "enumerate_qvos",
    "leapfrog_intersect",
    "load_edge_list",
    "load_graph",
    "make_undirected",
    "merge_intersect",
    "parse_query",
    "plan_query",
    "run_instance",
    "run_parallel",
    "stride_map",
]
