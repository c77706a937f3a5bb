"""Synthetic intersection benchmark behind the ``bench-intersect`` subcommand."""
from __future__ import annotations

import math
import time
from typing import Iterator, Sequence

import numpy as np

from .errors import ConfigurationError
from .intersect import (
    MAX_INPUT_SETS,
    FetchCache,
    MemStats,
    SetRef,
    allcompare_lines,
    fetch,
    leapfrog_intersect,
    merge_intersect,
)

CSV_SCHEMA_VERSION = 1
CSV_COLUMNS = [
    "schema",
    "kernel",
    "k",
    "set_size",
    "overlap",
    "line_width",
    "cache_hit_target",
    "repetitions",
    "output_size",
    "compare_steps_total",
    "compare_steps_max",
    "line_requests",
    "cache_hits",
    "cache_misses",
    "cache_hit_rate",
    "runtime_s",
]
KERNELS = ("allcompare", "leapfrog", "merge")


def make_sets(size: int, overlap: float, rng: np.random.Generator, k: int = MAX_INPUT_SETS) -> list[list[int]]:
    """``k`` sorted sets of ``size`` values sharing exactly ``round(overlap * size)`` values."""
    if not 0.0 <= overlap <= 1.0:
        raise ConfigurationError(f"overlap fraction {overlap} is infeasible; must lie in [0, 1]")
    common = int(round(overlap * size))
    own = size - common
    universe = 8 * (common + k * own) + 16
    values = rng.choice(universe, size=common + k * own, replace=False)
    shared = values[:common].tolist()
    sets = []
    for j in range(k):
        mine = values[common + j * own: common + (j + 1) * own].tolist()
        sets.append(sorted(shared + mine))
    return sets


def cached_schedule(repetitions: int, hit_fraction: float) -> list[bool]:
    """Which repetitions repeat the previous request.

    Repeats are spread evenly and total ``floor(repetitions * hit_fraction)``,
    except that the first request can never be a repeat.
    """
    if not 0.0 <= hit_fraction <= 1.0:
        raise ConfigurationError(f"cache-hit fraction {hit_fraction} must lie in [0, 1]")
    return [
        i > 0 and math.floor((i + 1) * hit_fraction) > math.floor(i * hit_fraction)
        for i in range(repetitions)
    ]


def run_config(
    kernel: str,
    k: int,
    size: int,
    overlap: float,
    line_width: int,
    hit_fraction: float,
    repetitions: int,
    seed: int,
) -> dict:
    if kernel not in KERNELS:
        raise ConfigurationError(f"unknown kernel {kernel!r}")
    if not 2 <= k <= MAX_INPUT_SETS:
        raise ConfigurationError(f"k must lie in [2, {MAX_INPUT_SETS}], got {k}")
    rng = np.random.default_rng([seed, size, int(round(overlap * 1000))])
    stats = MemStats()
    fetchers = [FetchCache(True) for _ in range(k)]
    steps_total = steps_max = 0
    output_size = 0
    elapsed = 0.0
    refs = None
    for rep, cached in enumerate(cached_schedule(repetitions, hit_fraction)):
        if refs is None or not cached:
            # always draw the full set of inputs so the first k are independent of k
            sets = make_sets(size, overlap, rng)
            refs = [SetRef(f"r{rep}s{j}", 0, len(s), s) for j, s in enumerate(sets[:k])]
        t0 = time.perf_counter()
        streams = [fetch(ref, fetchers[j], stats, line_width) for j, ref in enumerate(refs)]
        if kernel == "allcompare":
            lines, stage_steps = allcompare_lines(streams)
            out = [v for line in lines for v in line]
            steps = max(stage_steps)
        else:
            values = [[v for line in s for v in line] for s in streams]
            if kernel == "leapfrog":
                out, steps = leapfrog_intersect(values)
            else:
                out, steps = merge_intersect(values), 0
        elapsed += time.perf_counter() - t0
        steps_total += steps
        steps_max = max(steps_max, steps)
        output_size = len(out)
    return {
        "schema": CSV_SCHEMA_VERSION,
        "kernel": kernel,
        "k": k,
        "set_size": size,
        "overlap": overlap,
        "line_width": line_width,
        "cache_hit_target": hit_fraction,
        "repetitions": repetitions,
        "output_size": output_size,
        "compare_steps_total": steps_total,
        "compare_steps_max": steps_max,
        "line_requests": stats.line_requests,
        "cache_hits": stats.cache_hits,
        "cache_misses": stats.cache_misses,
        "cache_hit_rate": round(stats.hit_rate, 6),
        "runtime_s": round(elapsed, 6),
    }


def bench_intersect(
    sizes: Sequence[int],
    overlaps: Sequence[float],
    ks: Sequence[int],
    line_width: int = 16,
    hit_fractions: Sequence[float] = (0.0,),
    repetitions: int = 100,
    kernel: str = "allcompare",
    seed: int = 0,
) -> Iterator[dict]:
    """One CSV row per (size, overlap, k, cache-hit fraction) combination."""
    for size in sizes:
        for overlap in overlaps:
            for k in ks:
                for hit in hit_fractions:
                    yield run_config(kernel, k, size, overlap, line_width, hit, repetitions, seed)
