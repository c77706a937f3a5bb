"""Benchmark query shapes Q1-Q7.

Only the classes of these queries are known (cliques: Q1, Q6, Q7; cycles:
Q1, Q2, Q3; other: Q4, Q5, where Q2/Q3 and Q4/Q5 differ only in edge
orientation). The edge sets below are reconstructions consistent with that
classification; the ``queries/`` directory holds the same shapes as files.
"""
from __future__ import annotations

from itertools import combinations

from .query import DEFAULT_MAX_LEVELS, ISO, QueryGraph, parse_query


def _clique(k):
    return list(combinations(range(k), 2))


RECONSTRUCTED_QUERIES = {
    # triangle, oriented as the q0->q1, q0->q2, q2->q1 example query
    "q1": [(0, 1), (0, 2), (2, 1)],
    # directed 4-cycle
    "q2": [(0, 1), (1, 2), (2, 3), (3, 0)],
    # 4-cycle with alternating orientation
    "q3": [(0, 1), (2, 1), (2, 3), (0, 3)],
    # diamond: two triangles sharing edge 1-2
    "q4": [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)],
    # diamond, reoriented so level 3 reads incoming neighbors of q2
    "q5": [(0, 1), (0, 2), (1, 2), (1, 3), (3, 2)],
    "q6": _clique(4),
    "q7": _clique(5),
}


def reconstructed_query(
    name: str, directed: bool = True, mode: str = ISO, max_levels: int = DEFAULT_MAX_LEVELS
) -> QueryGraph:
    return parse_query(RECONSTRUCTED_QUERIES[name.lower()], directed, mode, max_levels)


def star_query(leaves: int, directed: bool = True, mode: str = ISO) -> QueryGraph:
    """Vertex 0 pointing at ``leaves`` leaf vertices."""
    return parse_query([(0, i) for i in range(1, leaves + 1)], directed, mode)
