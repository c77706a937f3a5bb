"""Input validation helpers for the estimator front-end."""
from __future__ import annotations

import numbers

import numpy as np

from .errors import ConfigurationError
from .graph import CsrGraph, EdgeList, build_csr, make_undirected
from .query import DEFAULT_MAX_LEVELS, QueryGraph, parse_query


def check_int(value, name: str, minimum: int = 1) -> int:
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise ConfigurationError(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise ConfigurationError(f"{name} must be >= {minimum}, got {value}")
    return int(value)


def check_edge_array(X) -> np.ndarray:
    """Coerce ``X`` to an ``(m, 2)`` array of non-negative integer ids."""
    if isinstance(X, EdgeList):
        X = X.edges
    arr = np.asarray(X)
    if arr.size == 0:
        return np.empty((0, 2), dtype=np.int64)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError(f"expected an (n_edges, 2) array of vertex ids, got shape {arr.shape}")
    if not np.issubdtype(arr.dtype, np.integer):
        if not np.all(np.equal(np.mod(arr, 1), 0)):
            raise ValueError("vertex ids must be integers")
    arr = arr.astype(np.int64)
    if (arr < 0).any():
        raise ValueError("vertex ids must be non-negative")
    return arr


def check_graph(X, directed: bool = True) -> CsrGraph:
    """Accept a :class:`CsrGraph`, :class:`EdgeList` or edge array."""
    if isinstance(X, CsrGraph):
        if directed or X.is_symmetric():
            return X
        return make_undirected(X)
    return build_csr(EdgeList(check_edge_array(X), directed))


def check_query(query, directed: bool = True, mode: str = "iso", max_levels: int = DEFAULT_MAX_LEVELS) -> QueryGraph:
    """Accept a :class:`QueryGraph` or an edge list; the estimator's settings win."""
    if isinstance(query, QueryGraph):
        if query.directed == directed and query.mode == mode and query.num_vertices <= max_levels:
            return query
        return parse_query(query.sorted_edges(), directed, mode, max_levels)
    return parse_query(check_edge_array(query).tolist(), directed, mode, max_levels)
