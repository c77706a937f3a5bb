"""Analytic memory-request model and its comparison with measured counters."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ModelError


@dataclass(frozen=True)
class ModelParams:
    num_vertices: int
    num_edges: int
    l: int = 16  # values per memory line
    f: int = 0  # refetched pointer pairs per matching
    m: int = 0  # matchings entering the extension
    s: int = 1  # sets intersected

    @property
    def avg_degree(self) -> float:
        return self.num_edges / self.num_vertices if self.num_vertices else 0.0


def initial_requests(num_vertices: int, num_edges: int, l: int = 16) -> int:
    """Requests to scan all ``|V| + 1`` pointers and ``|E|`` neighbors sequentially."""
    if l < 1:
        raise ModelError("line width l must be >= 1")
    return math.ceil((num_vertices + 1) / l) + math.ceil(num_edges / l)


def extension_requests(f: float, m: float, s: float, avg_degree: float, l: int = 16) -> float:
    """Requests of one extension: ``f*m`` pointer pairs plus ``s`` neighborhood reads per matching.

    A neighborhood smaller than a line still costs a whole line, hence
    ``min(l, avg_degree)`` in the denominator.
    """
    if l < 1:
        raise ModelError("line width l must be >= 1")
    if avg_degree <= 0:
        raise ModelError("average degree must be positive")
    return f * m + s * (m * avg_degree / min(l, avg_degree))


@dataclass(frozen=True)
class ModelComparison:
    measured: float
    predicted: float
    relative_error: float | None
    tolerance: float
    passed: bool
    flagged: bool = False


def compare_model(measured: float, predicted: float, tolerance: float = 0.25) -> ModelComparison:
    """Relative error ``|measured - predicted| / predicted`` against ``tolerance``.

    A zero prediction with non-zero measurement is flagged and fails
    without dividing.
    """
    if predicted == 0:
        ok = measured == 0
        return ModelComparison(measured, predicted, 0.0 if ok else None, tolerance, ok, flagged=not ok)
    err = abs(measured - predicted) / predicted
    return ModelComparison(measured, predicted, err, tolerance, err <= tolerance)


def estimate_run(graph, plan, stats, l: int = 16, tolerance: float = 0.25) -> list[tuple[str, ModelComparison]]:
    """Predicted vs. measured requests per pipeline stage of one uncached run.

    ``stats`` is the :class:`~wcojmatch.engine.RunStats` of a single
    instance over the whole vertex range.
    """
    rows = [(
        "source",
        compare_model(stats.memory[0].total_requests, initial_requests(graph.num_vertices, graph.num_edges, l), tolerance),
    )]
    for i, step in enumerate(plan.steps, start=1):
        predicted = extension_requests(
            step.num_refetch, stats.intermediates[i - 1], step.num_sets, graph.average_degree, l
        )
        rows.append((f"extend.{step.level}", compare_model(stats.memory[i].total_requests, predicted, tolerance)))
    return rows
