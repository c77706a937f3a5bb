"""Command-line driver.

Subcommands: ``run``, ``oracle``, ``bench-intersect``, ``estimate``, ``qvos``.
Reports are ``key: value`` lines; timing keys end in ``elapsed_s`` and are
the only fields that differ between identical invocations.

Exit codes: 0 success, 1 other error, 2 usage, 3 I/O, 4 parse,
5 query/plan, 6 configuration.
"""
from __future__ import annotations

import argparse
import csv
import logging
import sys
import time

from . import oracle
from .bench import CSV_COLUMNS, KERNELS, bench_intersect
from .engine import InstanceConfig, run_instance, run_parallel
from .errors import (
    ConfigurationError,
    EdgeListParseError,
    ModelError,
    OracleSizeError,
    PlanError,
    QueryError,
    WcojError,
)
from .graph import load_graph
from .intersect import DEFAULT_LINE_WIDTH, MemStats
from .perf_model import estimate_run
from .query import (
    DEFAULT_MAX_LEVELS,
    choose_best_qvo,
    default_qvo,
    enumerate_qvos,
    load_query,
    plan_query,
)

log = logging.getLogger("wcojmatch")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_IO = 3
EXIT_PARSE = 4
EXIT_QUERY = 5
EXIT_CONFIG = 6


def _fmt(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.6f}"
    if isinstance(value, (tuple, list)):
        return ",".join(str(v) for v in value)
    return str(value)


def emit(pairs, out=None):
    out = out or sys.stdout
    for key, value in pairs:
        out.write(f"{key}: {_fmt(value)}\n")


def _csv_ints(text):
    return [int(x) for x in text.split(",") if x.strip()]


def _csv_floats(text):
    return [float(x) for x in text.split(",") if x.strip()]


def _load_inputs(args):
    with open(args.query, encoding="utf-8") as fh:
        q, file_qvo = load_query(fh, directed=args.directed, mode=args.mode, max_levels=args.max_levels)
    g = load_graph(args.graph, directed=q.directed)
    return g, q, file_qvo


def _resolve_qvo(args, q, g, file_qvo):
    if args.qvo == "best":
        return choose_best_qvo(q, g, seed=args.seed)
    if args.qvo:
        return tuple(int(x) for x in args.qvo.split(","))
    if file_qvo is not None:
        return file_qvo
    return default_qvo(q)


def _write_matchings(path, matchings):
    with open(path, "w", encoding="utf-8") as fh:
        for t in matchings:
            fh.write(" ".join(str(v) for v in t) + "\n")


def _memory_pairs(prefix, mem: MemStats):
    return [
        (f"{prefix}line_requests", mem.line_requests),
        (f"{prefix}pointer_requests", mem.pointer_requests),
        (f"{prefix}cache_hits", mem.cache_hits),
        (f"{prefix}cache_misses", mem.cache_misses),
        (f"{prefix}cache_hit_rate", mem.hit_rate),
    ]


def cmd_run(args):
    g, q, file_qvo = _load_inputs(args)
    qvo = _resolve_qvo(args, q, g, file_qvo)
    plan = plan_query(q, qvo)
    cfg = InstanceConfig(
        caching=args.caching,
        pruning=args.pruning,
        count_only=args.count_only,
        line_width=args.line_width,
        capacity=args.max_levels,
    )
    start = time.perf_counter()
    result, stats = run_parallel(g, plan, args.instances, args.stride, cfg, args.n_jobs)
    elapsed = time.perf_counter() - start

    levels = [sum(s.intermediates[i] for s in stats) for i in range(plan.num_levels - 1)]
    total = MemStats()
    for s in stats:
        total += s.total_memory
    pairs = [
        ("matchings", result.count),
        ("mode", q.mode),
        ("directed", q.directed),
        ("qvo", plan.qvo),
        ("instances", args.instances),
        ("stride", args.stride),
        ("caching", args.caching),
        ("pruning", args.pruning),
        ("line_width", args.line_width),
        ("graph.vertices", g.num_vertices),
        ("graph.edges", g.num_edges),
    ]
    pairs += [(f"level.{i}.intermediates", c) for i, c in enumerate(levels)]
    pairs += _memory_pairs("memory.", total)
    pairs.append(("elapsed_s", elapsed))
    for i, s in enumerate(stats):
        p = f"instance.{i}."
        pairs += [(p + "interval", (s.interval.lo, s.interval.hi)), (p + "source_edges", s.source_edges)]
        pairs += [(p + f"level.{j}.intermediates", c) for j, c in enumerate(s.intermediates)]
        pairs += _memory_pairs(p, s.total_memory)
        pairs.append((p + "elapsed_s", s.elapsed))
    emit(pairs)
    if args.output and not args.count_only:
        _write_matchings(args.output, result.matchings)
    return EXIT_OK


def cmd_oracle(args):
    g, q, _ = _load_inputs(args)
    start = time.perf_counter()
    result = oracle.enumerate(g, q, count_only=args.count_only)
    emit([
        ("matchings", result.count),
        ("mode", q.mode),
        ("directed", q.directed),
        ("elapsed_s", time.perf_counter() - start),
    ])
    if args.output and not args.count_only:
        _write_matchings(args.output, result.matchings)
    return EXIT_OK


def cmd_bench_intersect(args):
    rows = bench_intersect(
        sizes=_csv_ints(args.sizes),
        overlaps=_csv_floats(args.overlap),
        ks=_csv_ints(args.k),
        line_width=args.line_width,
        hit_fractions=_csv_floats(args.cache_hit),
        repetitions=args.repetitions,
        kernel=args.kernel,
        seed=args.seed,
    )
    out = open(args.output, "w", newline="", encoding="utf-8") if args.output else sys.stdout
    try:
        writer = csv.DictWriter(out, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def cmd_estimate(args):
    g, q, file_qvo = _load_inputs(args)
    qvo = _resolve_qvo(args, q, g, file_qvo)
    plan = plan_query(q, qvo)
    cfg = InstanceConfig(caching=False, pruning=args.pruning, count_only=True, line_width=args.line_width, capacity=args.max_levels)
    _, stats = run_instance(g, plan, cfg)
    pairs = [
        ("qvo", plan.qvo),
        ("line_width", args.line_width),
        ("graph.vertices", g.num_vertices),
        ("graph.edges", g.num_edges),
        ("graph.avg_degree", g.average_degree),
    ]
    for name, cmp in estimate_run(g, plan, stats, args.line_width, args.tolerance):
        pairs += [
            (f"{name}.predicted", float(cmp.predicted)),
            (f"{name}.measured", cmp.measured),
            (f"{name}.relative_error", "nan" if cmp.relative_error is None else cmp.relative_error),
            (f"{name}.within_tolerance", cmp.passed),
        ]
    pairs.append(("elapsed_s", stats.elapsed))
    emit(pairs)
    return EXIT_OK


def cmd_qvos(args):
    with open(args.query, encoding="utf-8") as fh:
        q, _ = load_query(fh, directed=args.directed, mode=args.mode, max_levels=args.max_levels)
    for order in enumerate_qvos(q):
        try:
            plan = plan_query(q, order)
        except PlanError as exc:
            print(f"{_fmt(order)}  unplannable: {exc}")
            continue
        detail = " ".join(f"L{s.level}:f={s.num_refetch},s={s.num_sets}" for s in plan.steps)
        print(f"{_fmt(order)}  source={plan.source.direction} {detail}".rstrip())
    if args.graph:
        g = load_graph(args.graph, directed=q.directed)
        print(f"best: {_fmt(choose_best_qvo(q, g, budget=args.budget, seed=args.seed))}")
    return EXIT_OK


def _add_common(p, with_graph=True):
    if with_graph:
        p.add_argument("--graph", required=True, help="edge-list text file or CSR1 binary dump")
    p.add_argument("--query", required=True, help="query edge-list file with %%directed/%%mode/%%qvo directives")
    p.add_argument("--mode", choices=["hom", "iso"], default=None, help="override the query file mode")
    d = p.add_mutually_exclusive_group()
    d.add_argument("--directed", dest="directed", action="store_true", default=None)
    d.add_argument("--undirected", dest="directed", action="store_false")
    p.add_argument("--max-levels", type=int, default=DEFAULT_MAX_LEVELS)
    p.add_argument("--seed", type=int, default=0)


def build_parser():
    parser = argparse.ArgumentParser(prog="wcojmatch", description="Worst-case optimal join subgraph matching.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute a query on a data graph")
    _add_common(run)
    run.add_argument("--instances", type=int, default=4)
    run.add_argument("--stride", type=int, default=100)
    run.add_argument("--no-caching", dest="caching", action="store_false")
    run.add_argument("--no-pruning", dest="pruning", action="store_false")
    run.add_argument("--qvo", help="comma-separated order, or 'best'")
    run.add_argument("--count-only", action="store_true")
    run.add_argument("--line-width", type=int, default=DEFAULT_LINE_WIDTH)
    run.add_argument("--n-jobs", type=int, default=None)
    run.add_argument("--output", help="write one matching per line here")
    run.set_defaults(func=cmd_run)

    orc = sub.add_parser("oracle", help="brute-force enumeration (small inputs only)")
    _add_common(orc)
    orc.add_argument("--count-only", action="store_true")
    orc.add_argument("--output")
    orc.set_defaults(func=cmd_oracle)

    bench = sub.add_parser("bench-intersect", help="synthetic set-intersection sweep, CSV output")
    bench.add_argument("--sizes", default="16,32,48,64")
    bench.add_argument("--overlap", default="0,0.15,0.2,0.3", help="output size as a fraction of input size")
    bench.add_argument("--k", default="2,3,4")
    bench.add_argument("--line-width", type=int, default=DEFAULT_LINE_WIDTH)
    bench.add_argument("--cache-hit", default="0", help="fractions of repeated requests, e.g. 0,0.4,0.8")
    bench.add_argument("--repetitions", type=int, default=5000)
    bench.add_argument("--kernel", choices=KERNELS, default="allcompare")
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--output")
    bench.set_defaults(func=cmd_bench_intersect)

    est = sub.add_parser("estimate", help="analytic vs. measured memory requests (caching off)")
    _add_common(est)
    est.add_argument("--line-width", type=int, default=DEFAULT_LINE_WIDTH)
    est.add_argument("--qvo")
    est.add_argument("--no-pruning", dest="pruning", action="store_false")
    est.add_argument("--tolerance", type=float, default=0.25)
    est.set_defaults(func=cmd_estimate)

    qv = sub.add_parser("qvos", help="list query vertex orderings and their plans")
    _add_common(qv, with_graph=False)
    qv.add_argument("--graph", help="also pick the best ordering on this graph")
    qv.add_argument("--budget", type=int, default=8)
    qv.set_defaults(func=cmd_qvos)
    return parser


def _check_args(args):
    for name in ("instances", "stride", "line_width", "repetitions", "budget"):
        value = getattr(args, name, None)
        if value is not None and value < 1:
            raise ConfigurationError(f"--{name.replace('_', '-')} must be >= 1")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        _check_args(args)
        return args.func(args)
    except OSError as exc:
        log.error("I/O error: %s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except EdgeListParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (QueryError, PlanError, OracleSizeError) as exc:
        print(f"query error: {exc}", file=sys.stderr)
        return EXIT_QUERY
    except (ConfigurationError, ModelError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except WcojError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
