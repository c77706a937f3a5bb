"""The matching pipeline: source, filters, chained extenders and sink.

Matchings stream through generator stages one at a time. A partial matching
is a tuple of :class:`Slot` in QVO order; every slot carries the vertex plus
the left bound, size and direction of whichever neighborhood was last read
for it. A freshly added vertex has ``dir=None`` until an extender fetches
its pointers.

Complete matchings leave the sink re-ordered by query vertex, so
``result[i]`` is the data vertex matched to query vertex ``i`` regardless of
the QVO used.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np

from .errors import ConfigurationError
from .graph import CsrGraph, VertexInterval, partition_vertices, stride_map
from .intersect import (
    DEFAULT_LINE_WIDTH,
    MAX_INPUT_SETS,
    FetchCache,
    MemStats,
    SetRef,
    allcompare_lines,
    fetch,
    line_span,
)
from .query import DEFAULT_MAX_LEVELS, HOM, QueryPlan


class Slot(NamedTuple):
    vertex: int
    left: int = 0
    size: int = 0
    dir: str | None = None


PartialMatching = tuple  # tuple[Slot, ...]; its length is the matching level


@dataclass
class InstanceConfig:
    interval: VertexInterval | None = None  # None means every vertex
    caching: bool = True
    pruning: bool = True
    count_only: bool = False
    line_width: int = DEFAULT_LINE_WIDTH
    capacity: int = DEFAULT_MAX_LEVELS


@dataclass
class ResultSet:
    matchings: list = field(default_factory=list)
    count: int = 0

    def __len__(self):
        return self.count

    def as_array(self, width: int) -> np.ndarray:
        return np.asarray(self.matchings, dtype=np.int64).reshape(-1, width)


@dataclass
class RunStats:
    """Per-stage counters of one instance; stage 0 is the matching source."""

    intermediates: list
    memory: list
    compare_steps: list
    interval: VertexInterval
    source_edges: int = 0
    elapsed: float = 0.0

    @property
    def total_memory(self) -> MemStats:
        total = MemStats()
        for m in self.memory:
            total += m
        return total


class InstanceCaches:
    """Pointer-fetcher cache and per-spot set fetchers of every extender."""

    def __init__(self, num_extenders: int, enabled: bool, spots: int = MAX_INPUT_SETS):
        self.pointer = [FetchCache(enabled) for _ in range(num_extenders)]
        self.sets = [[FetchCache(enabled) for _ in range(spots)] for _ in range(num_extenders)]


def effective_thresholds(plan: QueryPlan, pruning: bool) -> list[dict]:
    """Per-slot minimum neighborhood sizes the filters enforce.

    Degree pruning is only sound when matched vertices are distinct; for
    homomorphisms the thresholds collapse to "non-empty".
    """
    if not pruning:
        return [{} for _ in plan.qvo]
    if plan.mode == HOM:
        return [{d: min(k, 1) for d, k in t.items()} for t in plan.slot_thresholds]
    return [dict(t) for t in plan.slot_thresholds]


def matching_filter(m: PartialMatching, thresholds, distinct_check: bool, inputs=None) -> bool:
    """Return True to keep ``m``.

    ``inputs`` lists ``(slot, dir, size)`` of the neighborhoods the next
    intersection reads; any empty one, or any below its slot threshold,
    discards the matching. Without ``inputs`` every slot that carries
    metadata is checked against its threshold instead. ``distinct_check``
    rejects a newest vertex that repeats an earlier one.
    """
    if inputs is not None:
        for slot, d, size in inputs:
            if size == 0:
                return False
            if thresholds is not None and size < thresholds[slot].get(d, 0):
                return False
    elif thresholds is not None:
        for slot, s in enumerate(m):
            if s.dir is not None and s.size < thresholds[slot].get(s.dir, 0):
                return False
    if distinct_check:
        newest = m[-1].vertex
        for s in m[:-1]:
            if s.vertex == newest:
                return False
    return True


def matching_source(
    g: CsrGraph,
    plan: QueryPlan,
    interval: VertexInterval,
    stats: MemStats,
    line_width: int = DEFAULT_LINE_WIDTH,
) -> Iterator[PartialMatching]:
    """Turn every edge leaving ``interval`` (in the source direction) into a level-2 matching.

    Pointers ``lo..hi`` and the neighbors they span are read sequentially
    and booked once, up front.
    """
    d = plan.source.direction
    ptr = g.arrays["pointers_" + d]
    nbr = g.arrays["neighbors_" + d]
    lo, hi = interval
    if hi <= lo:
        return
    stats.pointer_requests += line_span(lo, hi - lo + 1, line_width)
    stats.line_requests += line_span(ptr[lo], ptr[hi] - ptr[lo], line_width)
    for v in range(lo, hi):
        left = ptr[v]
        right = ptr[v + 1]
        if right == left:
            continue
        head = Slot(v, left, right - left, d)
        for u in nbr[left:right]:
            yield (head, Slot(u))


def pointer_fetch(
    m: PartialMatching,
    refetch: Sequence,
    g: CsrGraph,
    cache: FetchCache | None,
    stats: MemStats,
    line_width: int = DEFAULT_LINE_WIDTH,
    fetched: dict | None = None,
) -> PartialMatching:
    """Read pointers ``v`` and ``v + 1`` for every ``(slot, dir)`` in ``refetch``.

    The slot's metadata is replaced; ``fetched`` (if given) receives
    ``(slot, dir) -> (left, size)`` for each read.
    """
    if not refetch:
        return m
    slots = list(m)
    for slot, d in refetch:
        v = slots[slot].vertex
        array_id = "pointers_" + d
        lines = fetch(SetRef(array_id, v, 2, g.arrays[array_id]), cache, stats, line_width, kind="pointer")
        left, right = (lines[0] + lines[1]) if len(lines) == 2 else lines[0]
        slots[slot] = Slot(v, left, right - left, d)
        if fetched is not None:
            fetched[(slot, d)] = (left, right - left)
    return tuple(slots)


def matching_extender(
    stream: Iterable[PartialMatching],
    step,
    g: CsrGraph,
    pointer_cache: FetchCache | None,
    set_caches: Sequence[FetchCache | None],
    stats: MemStats,
    thresholds,
    line_width: int = DEFAULT_LINE_WIDTH,
    step_counter: list | None = None,
) -> Iterator[PartialMatching]:
    """Extend each matching by the next QVO vertex.

    Per matching: pointer fetch, empty-set and pruning filter, intersection
    of the mapped neighborhoods, then one output per candidate that passes
    the distinctness filter. Output order follows input order.
    """
    arrays = g.arrays
    refetch = step.refetch
    inputs_spec = step.intersect_inputs
    distinct = step.distinct_check
    k = len(inputs_spec)
    for m in stream:
        fetched = {}
        extended = pointer_fetch(m, refetch, g, pointer_cache, stats, line_width, fetched)
        inputs = []
        for slot, d in inputs_spec:
            meta = fetched.get((slot, d))
            if meta is None:
                s = m[slot]
                meta = (s.left, s.size)
            inputs.append((slot, d, meta[0], meta[1]))
        if not matching_filter(extended, thresholds, False, [(s, d, size) for s, d, _, size in inputs]):
            continue
        streams = []
        for spot, (_, d, left, size) in enumerate(inputs):
            array_id = "neighbors_" + d
            streams.append(fetch(SetRef(array_id, left, size, arrays[array_id]), set_caches[spot], stats, line_width))
        if k == 1:
            lines = streams[0]
        else:
            lines, stage_steps = allcompare_lines(streams)
            if step_counter is not None:
                step_counter[0] += max(stage_steps)
        for line in lines:
            for w in line:
                out = extended + (Slot(w),)
                if distinct and not matching_filter(out, None, True):
                    continue
                yield out


def matching_sink(stream: Iterable[PartialMatching], count_only: bool = False, qvo: Sequence[int] | None = None) -> ResultSet:
    """Strip metadata and collect complete matchings in query-vertex order."""
    result = ResultSet()
    if count_only:
        result.count = sum(1 for _ in stream)
        return result
    if qvo is None:
        for m in stream:
            result.matchings.append(tuple(s.vertex for s in m))
    else:
        position = [0] * len(qvo)
        for slot, qv in enumerate(qvo):
            position[qv] = slot
        for m in stream:
            result.matchings.append(tuple(m[p].vertex for p in position))
    result.count = len(result.matchings)
    return result


def _counted(stream, counts, index):
    for m in stream:
        counts[index] += 1
        yield m


def run_instance(g: CsrGraph, plan: QueryPlan, config: InstanceConfig | None = None) -> tuple[ResultSet, RunStats]:
    """Run source, filter, ``num_levels - 2`` extenders and sink over one vertex interval."""
    cfg = config or InstanceConfig()
    if plan.num_levels > cfg.capacity:
        raise ConfigurationError(
            f"query needs {plan.num_levels} levels but the instance has {cfg.capacity}"
        )
    if cfg.line_width < 1:
        raise ConfigurationError("line width must be >= 1")
    interval = cfg.interval if cfg.interval is not None else VertexInterval(0, g.num_vertices)
    if not 0 <= interval.lo <= interval.hi <= g.num_vertices:
        raise ConfigurationError(f"interval {tuple(interval)} outside [0, {g.num_vertices}]")
    if not plan.query.directed and not g.is_symmetric():
        raise ConfigurationError("undirected query on a graph that is not symmetric; call make_undirected first")

    start = time.perf_counter()
    stages = plan.num_levels - 1
    memory = [MemStats() for _ in range(stages)]
    counts = [0] * stages
    steps = [[0] for _ in range(stages)]
    thresholds = effective_thresholds(plan, cfg.pruning)
    caches = InstanceCaches(len(plan.steps), cfg.caching)

    stream = matching_source(g, plan, interval, memory[0], cfg.line_width)
    stream = (m for m in stream if matching_filter(m, thresholds, plan.distinct_check))
    stream = _counted(stream, counts, 0)
    for i, step in enumerate(plan.steps):
        stream = matching_extender(
            stream, step, g, caches.pointer[i], caches.sets[i], memory[i + 1],
            thresholds, cfg.line_width, steps[i + 1],
        )
        stream = _counted(stream, counts, i + 1)
    result = matching_sink(stream, cfg.count_only, plan.qvo)

    ptr = g.arrays["pointers_" + plan.source.direction]
    stats = RunStats(
        intermediates=counts,
        memory=memory,
        compare_steps=[s[0] for s in steps],
        interval=interval,
        source_edges=ptr[interval.hi] - ptr[interval.lo] if g.num_vertices else 0,
        elapsed=time.perf_counter() - start,
    )
    return result, stats


def run_parallel(
    g: CsrGraph,
    plan: QueryPlan,
    p: int = 1,
    stride: int = 1,
    config: InstanceConfig | None = None,
    n_jobs: int | None = None,
) -> tuple[ResultSet, list[RunStats]]:
    """Split the (stride-mapped) vertex range over ``p`` independent instances.

    Results come back in the original vertex ids, concatenated in instance
    order. ``n_jobs`` other than ``None``/1 runs the instances in worker
    processes via joblib.
    """
    if p < 1:
        raise ConfigurationError(f"number of instances must be >= 1, got {p}")
    if stride < 1:
        raise ConfigurationError(f"stride must be >= 1, got {stride}")
    cfg = config or InstanceConfig()
    inverse = None
    work_graph = g
    if p > 1 and stride > 1:
        work_graph, permutation = stride_map(g, stride)
        inverse = np.empty_like(permutation)
        inverse[permutation] = np.arange(len(permutation))
        inverse = inverse.tolist()
    configs = [replace(cfg, interval=iv) for iv in partition_vertices(work_graph.num_vertices, p)]

    if p == 1 or n_jobs in (None, 1):
        outputs = [run_instance(work_graph, plan, c) for c in configs]
    else:
        from joblib import Parallel, delayed

        outputs = Parallel(n_jobs=n_jobs)(delayed(run_instance)(work_graph, plan, c) for c in configs)

    merged = ResultSet()
    for result, _ in outputs:
        merged.count += result.count
        if inverse is None:
            merged.matchings.extend(result.matchings)
        else:
            merged.matchings.extend(tuple(inverse[v] for v in t) for t in result.matchings)
    return merged, [stats for _, stats in outputs]
