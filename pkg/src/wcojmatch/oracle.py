"""Brute-force subgraph enumeration used as ground truth in tests.

Deliberately shares nothing with the engine's intersection path: the data
graph is turned into a plain Python edge set and every query vertex is tried
against every data vertex, checking edges as soon as both ends are assigned.
"""
from __future__ import annotations

from .engine import ResultSet
from .errors import OracleSizeError
from .query import ISO, QueryGraph

MAX_ORACLE_VERTICES = 200
MAX_ORACLE_QUERY = 6


def enumerate(g, q: QueryGraph, count_only: bool = False) -> ResultSet:  # noqa: A001
    """All homomorphisms or isomorphisms of ``q`` in ``g``.

    Tuples are indexed by query vertex: ``t[i]`` is the data vertex matched
    to query vertex ``i``. They are produced in lexicographic order.
    """
    n = g.num_vertices
    if n > MAX_ORACLE_VERTICES or q.num_vertices > MAX_ORACLE_QUERY:
        raise OracleSizeError(
            f"oracle limited to {MAX_ORACLE_VERTICES} data and {MAX_ORACLE_QUERY} query vertices"
        )
    ptr = [int(x) for x in g.pointers_out]
    nbr = [int(x) for x in g.neighbors_out]
    edges = set()
    for u in range(n):
        for i in range(ptr[u], ptr[u + 1]):
            edges.add((u, nbr[i]))

    if q.directed:
        def connected(a, b):
            return (a, b) in edges
    else:
        def connected(a, b):
            return (a, b) in edges or (b, a) in edges

    # constraints checked when query vertex i is assigned: edges to j < i
    checks = []
    for i in range(q.num_vertices):
        mine = []
        for a, b in q.edges:
            if max(a, b) == i:
                mine.append((a, b))
        checks.append(mine)
    injective = q.mode == ISO

    result = ResultSet()
    assignment = [None] * q.num_vertices

    def extend(i):
        if i == q.num_vertices:
            result.count += 1
            if not count_only:
                result.matchings.append(tuple(assignment))
            return
        for v in range(n):
            if injective and v in assignment[:i]:
                continue
            assignment[i] = v
            if all(connected(assignment[a], assignment[b]) for a, b in checks[i]):
                extend(i + 1)
        assignment[i] = None

    extend(0)
    return result
