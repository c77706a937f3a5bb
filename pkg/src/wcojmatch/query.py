"""Query graphs, query vertex orderings (QVOs) and extension plans.

A plan fixes, for a given QVO, which CSR direction the source scans, which
earlier matching slots every extension intersects (and in which direction),
which slots need fresh pointer metadata first, and the per-slot degree
thresholds used by failing-set pruning.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence, TextIO

from .errors import PlanError, QueryError
from .graph import IN, OUT, load_edge_list
from .intersect import MAX_INPUT_SETS

HOM = "hom"
ISO = "iso"
_MODE_ALIASES = {"hom": HOM, "homomorphism": HOM, "iso": ISO, "isomorphism": ISO}
DEFAULT_MAX_LEVELS = 6


def normalize_mode(mode: str) -> str:
    try:
        return _MODE_ALIASES[str(mode).lower()]
    except KeyError:
        raise QueryError(f"unknown mode {mode!r}; expected 'hom' or 'iso'") from None


@dataclass(frozen=True)
class QueryGraph:
    num_vertices: int
    edges: frozenset
    directed: bool = True
    mode: str = ISO

    def has_edge(self, a: int, b: int) -> bool:
        if self.directed:
            return (a, b) in self.edges
        return (min(a, b), max(a, b)) in self.edges

    def adjacent(self, a: int, b: int) -> bool:
        return self.has_edge(a, b) or self.has_edge(b, a)

    def degrees(self, v: int) -> dict[str, int]:
        """Query-graph degree of ``v`` keyed by the CSR direction it constrains."""
        if self.directed:
            return {
                OUT: sum(1 for a, _ in self.edges if a == v),
                IN: sum(1 for _, b in self.edges if b == v),
            }
        return {OUT: sum(1 for e in self.edges if v in e)}

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)


def parse_query(
    edges: Iterable[Sequence[int]],
    directed: bool = True,
    mode: str = ISO,
    max_levels: int = DEFAULT_MAX_LEVELS,
) -> QueryGraph:
    """Validate a query edge list over ids ``0..n-1``.

    Rejects self-loops, disconnected queries (including unused ids), queries
    with fewer than two vertices and queries with more than ``max_levels``
    vertices.
    """
    mode = normalize_mode(mode)
    pairs = set()
    for e in edges:
        a, b = (int(x) for x in e)
        if a < 0 or b < 0:
            raise QueryError(f"negative query vertex in edge ({a}, {b})")
        if a == b:
            raise QueryError(f"self-loop on query vertex {a}")
        pairs.add((a, b) if directed else (min(a, b), max(a, b)))
    if not pairs:
        raise QueryError("query has no edges")
    n = max(max(e) for e in pairs) + 1
    if n > max_levels:
        raise QueryError(f"query has {n} vertices, more than the {max_levels} supported levels")

    adj = {v: set() for v in range(n)}
    for a, b in pairs:
        adj[a].add(b)
        adj[b].add(a)
    seen = {0}
    todo = deque([0])
    while todo:
        for w in adj[todo.popleft()]:
            if w not in seen:
                seen.add(w)
                todo.append(w)
    if len(seen) != n:
        missing = sorted(set(range(n)) - seen)
        raise QueryError(f"query is disconnected; unreachable vertices {missing}")
    return QueryGraph(n, frozenset(pairs), directed, mode)


def load_query(
    stream: Iterable[str],
    directed: bool | None = None,
    mode: str | None = None,
    max_levels: int = DEFAULT_MAX_LEVELS,
) -> tuple[QueryGraph, tuple[int, ...] | None]:
    """Read a query file: an edge list plus optional ``%`` directives.

    Recognised directives are ``%directed true|false``, ``%mode hom|iso``
    and ``%qvo 0,2,1``. Explicit ``directed``/``mode`` arguments override
    the file.
    """
    lines = list(stream)
    settings = {"directed": True, "mode": ISO, "qvo": None}
    for line in lines:
        text = line.strip()
        if not text.startswith("%"):
            continue
        parts = text[1:].split(None, 1)
        if len(parts) != 2:
            continue
        key, value = parts[0].lower(), parts[1].strip()
        if key == "directed":
            if value.lower() not in ("true", "false"):
                raise QueryError(f"bad %directed value {value!r}")
            settings["directed"] = value.lower() == "true"
        elif key == "mode":
            settings["mode"] = normalize_mode(value)
        elif key == "qvo":
            try:
                settings["qvo"] = tuple(int(x) for x in value.replace(" ", "").split(","))
            except ValueError:
                raise QueryError(f"bad %qvo value {value!r}") from None
    if directed is not None:
        settings["directed"] = directed
    if mode is not None:
        settings["mode"] = normalize_mode(mode)
    edges = load_edge_list(lines).edges
    q = parse_query(edges, settings["directed"], settings["mode"], max_levels)
    return q, settings["qvo"]


def dump_query(q: QueryGraph, qvo: Sequence[int] | None = None) -> str:
    out = [f"%directed {'true' if q.directed else 'false'}", f"%mode {q.mode}"]
    if qvo is not None:
        out.append("%qvo " + ",".join(str(v) for v in qvo))
    out += [f"{a} {b}" for a, b in q.sorted_edges()]
    return "\n".join(out) + "\n"


def is_valid_qvo(q: QueryGraph, order: Sequence[int]) -> bool:
    order = tuple(order)
    if sorted(order) != list(range(q.num_vertices)):
        return False
    if not q.adjacent(order[0], order[1]):
        return False
    return all(any(q.adjacent(order[i], order[j]) for j in range(i)) for i in range(2, len(order)))


def enumerate_qvos(q: QueryGraph) -> list[tuple[int, ...]]:
    """Every connected ordering of the query vertices, lexicographically."""
    return [p for p in itertools.permutations(range(q.num_vertices)) if is_valid_qvo(q, p)]


@dataclass(frozen=True)
class SourceSpec:
    direction: str
    thresholds: tuple  # degree thresholds of qvo[0] and qvo[1]


@dataclass(frozen=True)
class ExtensionStep:
    level: int
    new_vertex: int
    refetch: tuple  # (slot, direction) pairs whose pointers are read first
    intersect_inputs: tuple  # (slot, direction) pairs, one per query edge
    prune_threshold: dict
    distinct_check: bool

    @property
    def num_sets(self) -> int:
        return len(self.intersect_inputs)

    @property
    def num_refetch(self) -> int:
        return len(self.refetch)


@dataclass(frozen=True)
class QueryPlan:
    query: QueryGraph
    qvo: tuple
    source: SourceSpec
    steps: tuple

    @property
    def num_levels(self) -> int:
        return len(self.qvo)

    @property
    def mode(self) -> str:
        return self.query.mode

    @property
    def distinct_check(self) -> bool:
        return self.query.mode == ISO

    @property
    def slot_thresholds(self) -> tuple:
        """Degree thresholds of the query vertex held by each matching slot."""
        return tuple(self.query.degrees(v) for v in self.qvo)

    def num_edges_used(self) -> int:
        return 1 + sum(len(s.intersect_inputs) for s in self.steps)


_DIR_ORDER = {OUT: 0, IN: 1}


def plan_query(q: QueryGraph, qvo: Sequence[int], max_sets: int = MAX_INPUT_SETS) -> QueryPlan:
    """Compile ``qvo`` into source parameters and one extension step per level >= 2."""
    qvo = tuple(int(v) for v in qvo)
    if not is_valid_qvo(q, qvo):
        raise PlanError(f"{qvo} is not a valid query vertex ordering")
    a, b = qvo[0], qvo[1]
    if q.directed:
        if q.has_edge(a, b) and q.has_edge(b, a):
            raise PlanError(f"QVO {qvo} starts on a reciprocal edge pair; pick another ordering")
        direction = OUT if q.has_edge(a, b) else IN
    else:
        direction = OUT
    source = SourceSpec(direction, (q.degrees(a), q.degrees(b)))

    slot_dir = [direction, None]
    steps = []
    for level in range(2, len(qvo)):
        w = qvo[level]
        inputs = []
        for j in range(level):
            u = qvo[j]
            if q.directed:
                if q.has_edge(u, w):
                    inputs.append((j, OUT))
                if q.has_edge(w, u):
                    inputs.append((j, IN))
            elif q.has_edge(u, w):
                inputs.append((j, OUT))
        if len(inputs) > max_sets:
            raise PlanError(
                f"query vertex {w} has {len(inputs)} back-edges under QVO {qvo}; at most {max_sets} supported"
            )
        inputs.sort(key=lambda e: (e[0], _DIR_ORDER[e[1]]))
        refetch = [(j, d) for j, d in inputs if slot_dir[j] != d]
        for j, d in refetch:
            slot_dir[j] = d
        slot_dir.append(None)
        steps.append(
            ExtensionStep(
                level=level,
                new_vertex=w,
                refetch=tuple(refetch),
                intersect_inputs=tuple(inputs),
                prune_threshold=q.degrees(w),
                distinct_check=q.mode == ISO,
            )
        )
    return QueryPlan(q, qvo, source, tuple(steps))


def plannable_qvos(q: QueryGraph, max_sets: int = MAX_INPUT_SETS) -> list[tuple[int, ...]]:
    out = []
    for order in enumerate_qvos(q):
        try:
            plan_query(q, order, max_sets)
        except PlanError:
            continue
        out.append(order)
    return out


def default_qvo(q: QueryGraph, max_sets: int = MAX_INPUT_SETS) -> tuple[int, ...]:
    """First lexicographic QVO that compiles into a plan."""
    for order in enumerate_qvos(q):
        try:
            plan_query(q, order, max_sets)
        except PlanError:
            continue
        return order
    raise PlanError("no query vertex ordering of this query can be planned")


def choose_best_qvo(q: QueryGraph, graph, budget: int = 8, seed: int = 0, sample_fraction: float = 0.1):
    """Pick the QVO producing the fewest intermediate matchings on a sample.

    Experimental. Runs the engine on one seeded random vertex interval of
    ``graph`` for each of the first ``budget`` plannable QVOs. Ties go to
    the lexicographically smaller order.
    """
    import numpy as np

    from .engine import InstanceConfig, run_instance
    from .graph import VertexInterval

    if budget < 1:
        raise PlanError("budget must allow at least one candidate QVO")
    candidates = plannable_qvos(q)[:budget]
    if not candidates:
        raise PlanError("no query vertex ordering of this query can be planned")
    if len(candidates) == 1:
        return candidates[0]
    n = graph.num_vertices
    size = max(1, int(np.ceil(n * sample_fraction))) if n else 0
    rng = np.random.default_rng(seed)
    lo = int(rng.integers(0, n - size + 1)) if n else 0
    cfg = InstanceConfig(interval=VertexInterval(lo, lo + size), count_only=True)
    best, best_score = None, None
    for order in candidates:
        _, stats = run_instance(graph, plan_query(q, order), cfg)
        score = sum(stats.intermediates)
        if best_score is None or score < best_score:
            best, best_score = order, score
    return best
