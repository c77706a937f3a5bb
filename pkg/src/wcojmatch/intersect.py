"""Sorted-set intersection kernels and the line-granular fetch model.

Three kernels live here:

* :func:`merge_intersect` -- plain k-way merge, the reference result.
* :func:`leapfrog_intersect` -- search/sync rounds over all sets.
* :func:`allcompare_intersect` -- block-wise all-to-all comparison of whole
  memory lines, chained pairwise for up to four sets.

Sets reach the AllCompare kernel through :func:`fetch`, which splits a slice
of a backing array into memory-aligned lines of ``line_width`` values,
accounts the memory requests in :class:`MemStats` and serves repeated
requests from a single-entry :class:`FetchCache`.
"""
from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass, field, fields
from typing import Sequence

from .errors import ConfigurationError, ContractViolation

DEFAULT_LINE_WIDTH = 16
MAX_INPUT_SETS = 4

Line = tuple  # ascending values of one memory line; its maximum is line[-1]


@dataclass(frozen=True)
class SetRef:
    """A slice ``data[left:left + size]`` of one backing array."""

    array_id: str
    left: int
    size: int
    data: Sequence[int] = field(default=(), compare=False, repr=False)

    @classmethod
    def of(cls, values: Sequence[int], array_id: str = "other") -> "SetRef":
        values = list(values)
        return cls(array_id, 0, len(values), values)

    @property
    def key(self):
        return (self.array_id, self.left, self.size)

    def values(self) -> list[int]:
        return list(self.data[self.left:self.left + self.size])


@dataclass
class MemStats:
    line_requests: int = 0
    pointer_requests: int = 0
    cache_hits: int = 0
    cache_misses: int = 0

    def __add__(self, other: "MemStats") -> "MemStats":
        return MemStats(*(getattr(self, f.name) + getattr(other, f.name) for f in fields(self)))

    def __iadd__(self, other: "MemStats") -> "MemStats":
        for f in fields(self):
            setattr(self, f.name, getattr(self, f.name) + getattr(other, f.name))
        return self

    @property
    def total_requests(self) -> int:
        return self.line_requests + self.pointer_requests

    @property
    def hit_rate(self) -> float:
        lookups = self.cache_hits + self.cache_misses
        return self.cache_hits / lookups if lookups else 0.0

    def as_dict(self) -> dict[str, int]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


class FetchCache:
    """Remembers the most recent request and the lines it returned.

    A request hits only if array, left bound and size all match the stored
    request. A disabled cache never hits and never stores.
    """

    def __init__(self, enabled: bool = True):
        self.enabled = enabled
        self.valid = False
        self.key = None
        self.stored_lines: list[Line] = []

    @property
    def last_array(self):
        return self.key[0] if self.valid else None

    @property
    def last_left(self):
        return self.key[1] if self.valid else None

    @property
    def last_size(self):
        return self.key[2] if self.valid else None

    def lookup(self, key):
        if self.enabled and self.valid and self.key == key:
            return self.stored_lines
        return None

    def store(self, key, lines):
        if self.enabled:
            self.key = key
            self.stored_lines = lines
            self.valid = True

    def clear(self):
        self.valid = False
        self.key = None
        self.stored_lines = []


def line_span(left: int, size: int, line_width: int = DEFAULT_LINE_WIDTH) -> int:
    """Number of ``line_width``-aligned memory lines overlapping ``[left, left + size)``."""
    if size <= 0:
        return 0
    return (left + size - 1) // line_width - left // line_width + 1


def split_lines(data: Sequence[int], left: int, size: int, line_width: int = DEFAULT_LINE_WIDTH) -> list[Line]:
    """Cut ``data[left:left+size]`` at memory-line boundaries."""
    lines = []
    pos, end = left, left + size
    while pos < end:
        stop = min(end, (pos // line_width + 1) * line_width)
        lines.append(tuple(data[pos:stop]))
        pos = stop
    return lines


def fetch(
    ref: SetRef,
    cache: FetchCache | None,
    stats: MemStats,
    line_width: int = DEFAULT_LINE_WIDTH,
    kind: str = "line",
) -> list[Line]:
    """Fetch the lines of ``ref`` through ``cache``, accounting requests in ``stats``.

    ``kind="pointer"`` books the memory requests as pointer requests instead
    of neighbor-line requests. Empty requests touch neither memory nor cache.
    """
    if ref.size == 0:
        return []
    key = (ref.array_id, ref.left, ref.size)
    if cache is not None:
        lines = cache.lookup(key)
        if lines is not None:
            stats.cache_hits += 1
            return lines
    stats.cache_misses += 1
    span = (ref.left + ref.size - 1) // line_width - ref.left // line_width + 1
    if kind == "pointer":
        stats.pointer_requests += span
    else:
        stats.line_requests += span
    lines = split_lines(ref.data, ref.left, ref.size, line_width)
    if cache is not None:
        cache.store(key, lines)
    return lines


def to_lines(values: Sequence[int], line_width: int = DEFAULT_LINE_WIDTH) -> list[Line]:
    """Chunk a set into lines of ``line_width`` starting at its first element."""
    values = list(values)
    return [tuple(values[i:i + line_width]) for i in range(0, len(values), line_width)]


def _check_ascending(values, what="set"):
    values = list(values)
    for a, b in zip(values, values[1:]):
        if not a < b:
            raise ContractViolation(f"{what} is not strictly ascending at {a!r}, {b!r}")
    return values


def _check_line_stream(lines, line_width):
    prev = None
    for line in lines:
        if len(line) > line_width:
            raise ContractViolation(f"line of {len(line)} values exceeds line width {line_width}")
        _check_ascending(line, "line")
        if line and prev is not None and not prev < line[0]:
            raise ContractViolation("line stream is not ascending across lines")
        if line:
            prev = line[-1]


def merge_intersect(sets: Sequence[Sequence[int]]) -> list[int]:
    """Values present in every input, by pairwise two-pointer merging."""
    if len(sets) < 1:
        raise ConfigurationError("merge_intersect needs at least one set")
    result = _check_ascending(sets[0])
    for other in sets[1:]:
        other = _check_ascending(other)
        merged = []
        i = j = 0
        while i < len(result) and j < len(other):
            if result[i] < other[j]:
                i += 1
            elif other[j] < result[i]:
                j += 1
            else:
                merged.append(result[i])
                i += 1
                j += 1
        result = merged
    return result


def leapfrog_intersect(sets: Sequence[Sequence[int]]) -> tuple[list[int], int]:
    """LeapFrog intersection returning ``(values, rounds)``.

    Each round every set drops its elements below the current search item;
    if all sets then agree on the search item it is emitted and every set
    advances by one. The next search item is the largest head among the sets.
    Ends as soon as one set runs dry.
    """
    sets = [_check_ascending(s) for s in sets]
    k = len(sets)
    if k < 2:
        raise ConfigurationError(f"leapfrog needs at least 2 sets, got {k}")
    if any(not s for s in sets):
        return [], 0

    pos = [0] * k
    search = min(0, min(s[0] for s in sets))
    out: list[int] = []
    rounds = 0
    while True:
        rounds += 1
        for i, s in enumerate(sets):
            p = bisect_left(s, search, pos[i])
            if p == len(s):
                return out, rounds
            pos[i] = p
        heads = [s[p] for s, p in zip(sets, pos)]
        if all(h == search for h in heads):
            out.append(search)
            for i, s in enumerate(sets):
                pos[i] += 1
                if pos[i] == len(s):
                    return out, rounds
            heads = [s[p] for s, p in zip(sets, pos)]
        search = max(heads)


def _compare_stage(a: Sequence[Line], b: Sequence[Line]) -> tuple[list[Line], int]:
    """One AllCompare operator: returns the output lines and compare steps."""
    out = []
    steps = 0
    ia = ib = 0
    na, nb = len(a), len(b)
    while ia < na and ib < nb:
        la, lb = a[ia], b[ib]
        steps += 1
        ma, mb = la[-1], lb[-1]
        if la[0] <= mb and lb[0] <= ma:
            common = set(la).intersection(lb)
            if common:
                out.append(tuple(sorted(common)))
        if ma < mb:
            ia += 1
        elif mb < ma:
            ib += 1
        else:
            ia += 1
            ib += 1
    # whatever remains in the other stream is flushed without output
    return out, steps


def allcompare_pair(
    a: Sequence[Line], b: Sequence[Line], line_width: int = DEFAULT_LINE_WIDTH
) -> tuple[list[int], int]:
    """Intersect two line streams with AllCompare, returning ``(values, compare_steps)``.

    Per step all values of the two current lines are compared and the common
    ones emitted. The line with the strictly smaller maximum is retired; on
    equal maxima both are.
    """
    a = [tuple(line) for line in a if len(line)]
    b = [tuple(line) for line in b if len(line)]
    _check_line_stream(a, line_width)
    _check_line_stream(b, line_width)
    out, steps = _compare_stage(a, b)
    return [v for line in out for v in line], steps


def allcompare_lines(streams: Sequence[Sequence[Line]]) -> tuple[list[Line], list[int]]:
    """Chain pairwise AllCompare stages over ``streams``.

    Stage ``i`` intersects the running result with ``streams[i + 1]``; each
    non-empty output of a compare step is one line of the intermediate
    stream. Returns the final lines and the step count of every stage.
    """
    current = streams[0]
    stage_steps = []
    for nxt in streams[1:]:
        current, steps = _compare_stage(current, nxt)
        stage_steps.append(steps)
    return current, stage_steps


def allcompare_intersect(
    sets: Sequence[SetRef | Sequence[int]],
    line_width: int = DEFAULT_LINE_WIDTH,
    fetchers: Sequence[FetchCache | None] | None = None,
    stats: MemStats | None = None,
    max_sets: int = MAX_INPUT_SETS,
) -> tuple[list[int], int]:
    """Multi-set AllCompare over 2..``max_sets`` inputs.

    Every input is fetched through its own fetcher (``fetchers[i]``, or
    uncached when missing). The stages run as a pipeline, so the reported
    compare steps are those of the slowest stage.

    Returns
    -------
    values : list of int
        The intersection, ascending.
    compare_steps : int
        Steps of the busiest stage.
    """
    k = len(sets)
    if not 2 <= k <= max_sets:
        raise ConfigurationError(f"AllCompare takes 2..{max_sets} input sets, got {k}")
    if stats is None:
        stats = MemStats()
    refs = [s if isinstance(s, SetRef) else SetRef.of(s) for s in sets]
    streams = []
    for i, ref in enumerate(refs):
        cache = fetchers[i] if fetchers is not None and i < len(fetchers) else None
        lines = fetch(ref, cache, stats, line_width)
        _check_line_stream(lines, line_width)
        streams.append(lines)
    out, stage_steps = allcompare_lines(streams)
    return [v for line in out for v in line], max(stage_steps)
