"""scikit-learn style front-end.

``fit`` takes the data graph; ``predict`` turns a query into its matchings
and ``transform`` maps a batch of queries to match counts, so the matcher
can sit in a feature pipeline.

>>> m = SubgraphMatcher(mode="iso", n_instances=1).fit([(0, 1), (1, 2), (2, 0)])
>>> m.count([(0, 1), (1, 2), (2, 0)])
3
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from . import oracle
from .engine import InstanceConfig, ResultSet, run_parallel
from .intersect import DEFAULT_LINE_WIDTH
from .query import DEFAULT_MAX_LEVELS, choose_best_qvo, default_qvo, normalize_mode, plan_query
from .validation import check_graph, check_int, check_query


class SubgraphMatcher(TransformerMixin, BaseEstimator):
    """Worst-case optimal join subgraph matcher.

    Parameters
    ----------
    mode : {"iso", "hom"}
        Subgraph isomorphisms (distinct vertices) or homomorphisms.
    directed : bool
        Treat data and query graphs as directed. When False the data graph
        is symmetrized at ``fit``.
    qvo : sequence of int, "best" or None
        Query vertex ordering. None takes the first plannable ordering,
        "best" samples candidates with :func:`~wcojmatch.query.choose_best_qvo`.
    n_instances : int
        Independent engine instances, each owning one vertex interval.
    stride : int
        Stride for vertex relabeling before partitioning (only with
        ``n_instances > 1``).
    caching, pruning : bool
        Input-set caching and failing-set pruning.
    line_width : int
        Values per memory line.
    max_levels : int
        Largest supported query size.
    count_only : bool
        Skip materialising matchings in :meth:`match`.
    n_jobs : int or None
        Worker processes for the instances (joblib semantics).
    random_state : int
        Seed for ``qvo="best"`` sampling.
    """

    def __init__(
        self,
        mode="iso",
        directed=True,
        qvo=None,
        n_instances=4,
        stride=100,
        caching=True,
        pruning=True,
        line_width=DEFAULT_LINE_WIDTH,
        max_levels=DEFAULT_MAX_LEVELS,
        count_only=False,
        n_jobs=None,
        random_state=0,
    ):
        self.mode = mode
        self.directed = directed
        self.qvo = qvo
        self.n_instances = n_instances
        self.stride = stride
        self.caching = caching
        self.pruning = pruning
        self.line_width = line_width
        self.max_levels = max_levels
        self.count_only = count_only
        self.n_jobs = n_jobs
        self.random_state = random_state

    def fit(self, X, y=None):
        """Build the dual CSR data graph from ``X`` (edge array, EdgeList or CsrGraph)."""
        check_int(self.n_instances, "n_instances")
        check_int(self.stride, "stride")
        check_int(self.line_width, "line_width")
        check_int(self.max_levels, "max_levels", minimum=2)
        normalize_mode(self.mode)
        self.graph_ = check_graph(X, bool(self.directed))
        self.n_vertices_ = self.graph_.num_vertices
        self.n_edges_ = self.graph_.num_edges
        return self

    def _plan(self, query, qvo):
        q = check_query(query, bool(self.directed), normalize_mode(self.mode), self.max_levels)
        qvo = self.qvo if qvo is None else qvo
        if qvo is None:
            qvo = default_qvo(q)
        elif isinstance(qvo, str) and qvo == "best":
            qvo = choose_best_qvo(q, self.graph_, seed=self.random_state)
        return plan_query(q, qvo)

    def match(self, query, qvo=None, count_only=None) -> ResultSet:
        """Run ``query`` and return its :class:`~wcojmatch.engine.ResultSet`.

        Per-instance statistics land in ``stats_`` and the plan in ``plan_``.
        """
        check_is_fitted(self, "graph_")
        plan = self._plan(query, qvo)
        cfg = InstanceConfig(
            caching=self.caching,
            pruning=self.pruning,
            count_only=self.count_only if count_only is None else count_only,
            line_width=self.line_width,
            capacity=self.max_levels,
        )
        result, stats = run_parallel(self.graph_, plan, self.n_instances, self.stride, cfg, self.n_jobs)
        self.plan_ = plan
        self.stats_ = stats
        return result

    def predict(self, query, qvo=None) -> np.ndarray:
        """Matchings as an ``(n_matchings, n_query_vertices)`` array of dense vertex ids."""
        result = self.match(query, qvo, count_only=False)
        return result.as_array(self.plan_.num_levels)

    def count(self, query, qvo=None) -> int:
        return self.match(query, qvo, count_only=True).count

    def transform(self, X):
        """Map each query in ``X`` to its match count, shape ``(n_queries, 1)``."""
        return np.array([[self.count(q)] for q in X], dtype=np.int64)

    def to_raw_ids(self, matchings) -> np.ndarray:
        """Translate dense ids back to the raw ids of the input edge list."""
        check_is_fitted(self, "graph_")
        return self.graph_.vertex_ids[np.asarray(matchings, dtype=np.int64)]


class BruteForceMatcher(BaseEstimator):
    """Exhaustive enumeration with the same ``fit``/``predict`` surface, for checking."""

    def __init__(self, mode="iso", directed=True):
        self.mode = mode
        self.directed = directed

    def fit(self, X, y=None):
        self.graph_ = check_graph(X, bool(self.directed))
        return self

    def match(self, query) -> ResultSet:
        check_is_fitted(self, "graph_")
        q = check_query(query, bool(self.directed), normalize_mode(self.mode))
        return oracle.enumerate(self.graph_, q)

    def predict(self, query) -> np.ndarray:
        q = check_query(query, bool(self.directed), normalize_mode(self.mode))
        return self.match(q).as_array(q.num_vertices)

    def count(self, query) -> int:
        return self.match(query).count
