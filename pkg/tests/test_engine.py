from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wcojmatch import oracle
from wcojmatch.engine import (
    InstanceCaches,
    InstanceConfig,
    ResultSet,
    Slot,
    effective_thresholds,
    matching_extender,
    matching_filter,
    matching_sink,
    matching_source,
    pointer_fetch,
    run_instance,
    run_parallel,
)
from wcojmatch.errors import ConfigurationError
from wcojmatch.graph import IN, OUT, EdgeList, VertexInterval, build_csr, make_undirected
from wcojmatch.intersect import FetchCache, MemStats
from wcojmatch.query import enumerate_qvos, parse_query, plan_query, plannable_qvos
from wcojmatch.shapes import reconstructed_query
from wcojmatch.synthetic import random_graph

from .conftest import FIG3_EDGES, FIG3_HOM, FIG3_ISO, FIG3_QUERY


def vertices(stream):
    return [tuple(s.vertex for s in m) for m in stream]


def run(g, q, qvo=None, **cfg):
    plan = plan_query(q, qvo or plannable_qvos(q)[0])
    return run_instance(g, plan, InstanceConfig(**cfg))


class TestSource:
    def test_fig3_one_matching_per_edge(self, fig3_graph, fig3_iso):
        plan = plan_query(fig3_iso, (0, 1, 2))
        out = vertices(matching_source(fig3_graph, plan, VertexInterval(0, 4), MemStats()))
        assert len(out) == 7
        assert sorted(out) == sorted(FIG3_EDGES)

    def test_empty_interval(self, fig3_graph, fig3_iso):
        plan = plan_query(fig3_iso, (0, 1, 2))
        stats = MemStats()
        assert list(matching_source(fig3_graph, plan, VertexInterval(2, 2), stats)) == []
        assert stats.total_requests == 0

    def test_single_row(self, fig3_graph, fig3_iso):
        plan = plan_query(fig3_iso, (0, 1, 2))
        out = list(matching_source(fig3_graph, plan, VertexInterval(2, 3), MemStats()))
        assert vertices(out) == [(2, 2), (2, 3)]
        head, tail = out[0]
        assert head == Slot(2, 3, 2, OUT)
        assert tail.dir is None

    def test_in_direction(self, fig3_graph, fig3_iso):
        plan = plan_query(fig3_iso, (1, 0, 2))
        out = vertices(matching_source(fig3_graph, plan, VertexInterval(1, 2), MemStats()))
        assert out == [(1, 0), (1, 3)]

    def test_line_accounting(self, fig3_graph, fig3_iso):
        plan = plan_query(fig3_iso, (0, 1, 2))
        stats = MemStats()
        list(matching_source(fig3_graph, plan, VertexInterval(0, 4), stats))
        assert stats.pointer_requests == 1 and stats.line_requests == 1


class TestFilter:
    def test_q5_prune(self):
        q = reconstructed_query("q5")
        plan = plan_query(q, (0, 1, 2, 3))
        thresholds = effective_thresholds(plan, True)
        assert thresholds[0][OUT] == 2
        m = (Slot(0, 0, 1, OUT), Slot(1))
        assert not matching_filter(m, thresholds, False)
        m = (Slot(0, 0, 2, OUT), Slot(1))
        assert matching_filter(m, thresholds, False)

    def test_distinct_iso(self):
        assert not matching_filter((Slot(2), Slot(2)), None, True)

    def test_distinct_hom_keeps(self):
        assert matching_filter((Slot(2), Slot(2)), None, False)

    def test_empty_input_set(self):
        assert not matching_filter((Slot(0), Slot(1)), None, False, [(0, OUT, 0)])

    def test_pruning_disabled(self):
        plan = plan_query(reconstructed_query("q5"), (0, 1, 2, 3))
        thresholds = effective_thresholds(plan, False)
        assert matching_filter((Slot(0, 0, 1, OUT), Slot(1)), thresholds, False)

    def test_hom_thresholds_collapse(self):
        plan = plan_query(reconstructed_query("q5", mode="hom"), (0, 1, 2, 3))
        assert all(v <= 1 for t in effective_thresholds(plan, True) for v in t.values())


class TestPointerFetch:
    def test_fig3_d2_out(self, fig3_graph):
        m = (Slot(0, 0, 2, OUT), Slot(2))
        stats = MemStats()
        out = pointer_fetch(m, [(1, OUT)], fig3_graph, FetchCache(), stats)
        assert out[1] == Slot(2, int(fig3_graph.pointers_out[2]), 2, OUT)
        assert stats.pointer_requests == 1

    def test_no_refetch(self, fig3_graph):
        m = (Slot(0, 0, 2, OUT), Slot(2))
        stats = MemStats()
        assert pointer_fetch(m, (), fig3_graph, FetchCache(), stats) is m
        assert stats == MemStats()

    def test_line_straddle(self):
        g = build_csr(EdgeList([(i, (i + 1) % 40) for i in range(40)]))
        stats = MemStats()
        pointer_fetch((Slot(15),), [(0, IN)], g, None, stats, 16)
        assert stats.pointer_requests == 2
        pointer_fetch((Slot(14),), [(0, IN)], g, None, stats, 16)
        assert stats.pointer_requests == 3

    def test_cached_pointer(self, fig3_graph):
        cache, stats = FetchCache(), MemStats()
        for _ in range(3):
            pointer_fetch((Slot(1),), [(0, OUT)], fig3_graph, cache, stats)
        assert stats.pointer_requests == 1 and stats.cache_hits == 2


class TestExtender:
    def _extend(self, g, q, m, qvo=(0, 1, 2)):
        plan = plan_query(q, qvo)
        caches = InstanceCaches(1, True)
        stats = MemStats()
        out = matching_extender(
            [m], plan.steps[0], g, caches.pointer[0], caches.sets[0], stats,
            effective_thresholds(plan, True),
        )
        return vertices(out), stats

    def test_fig3_s0(self, fig3_graph, fig3_iso):
        # slot 0 = q0 = d0, slot 1 = q1 = d2 leaves q2 = d1
        m = (Slot(0, 0, 2, OUT), Slot(2))
        out, stats = self._extend(fig3_graph, fig3_iso, m)
        assert out == [(0, 2, 1)]
        assert stats.pointer_requests == 1

    def test_empty_neighborhood(self):
        g = build_csr(EdgeList([(0, 1), (1, 2), (0, 2)]))
        q = parse_query(FIG3_QUERY)
        # vertex 2 has no out-edges, so out(2) cannot feed q0
        m = (Slot(2, 0, 0, OUT), Slot(0))
        out, _ = self._extend(g, q, m)
        assert out == []

    def test_order_follows_input(self, fig3_graph, fig3_hom):
        plan = plan_query(fig3_hom, (0, 1, 2))
        src = matching_source(fig3_graph, plan, VertexInterval(0, 4), MemStats())
        caches = InstanceCaches(1, True)
        out = vertices(
            matching_extender(src, plan.steps[0], fig3_graph, caches.pointer[0], caches.sets[0], MemStats(), None)
        )
        assert out == sorted(out)


class TestSink:
    def test_empty(self):
        assert matching_sink(iter([])).count == 0

    def test_one(self):
        r = matching_sink([(Slot(3), Slot(1))])
        assert r.count == 1 and r.matchings == [(3, 1)]

    def test_count_only(self):
        r = matching_sink([(Slot(3), Slot(1))] * 5, count_only=True)
        assert r.count == 5 and r.matchings == []

    def test_reorders_to_query_vertices(self):
        r = matching_sink([(Slot(7), Slot(8), Slot(9))], qvo=(2, 0, 1))
        assert r.matchings == [(8, 9, 7)]

    def test_as_array(self):
        r = ResultSet([(1, 2), (3, 4)], 2)
        assert r.as_array(2).shape == (2, 2)
        assert ResultSet().as_array(3).shape == (0, 3)


class TestRunInstance:
    def test_fig3_iso(self, fig3_graph, fig3_iso):
        r, stats = run(fig3_graph, fig3_iso, (0, 1, 2))
        assert r.count == 2 and set(r.matchings) == FIG3_ISO
        # out(d1) is below q0's out-degree 2 and (d2, d2) repeats a vertex
        assert stats.intermediates[0] == 5

    def test_fig3_hom(self, fig3_graph, fig3_hom):
        r, _ = run(fig3_graph, fig3_hom, (0, 1, 2))
        assert r.count == 6 and Counter(r.matchings) == Counter(FIG3_HOM)

    def test_single_edge_query(self, fig3_graph):
        r, _ = run(fig3_graph, parse_query([(0, 1)], mode="hom"))
        assert r.count == 7

    @pytest.mark.parametrize("mode, expected", [("iso", FIG3_ISO), ("hom", FIG3_HOM)])
    def test_every_qvo(self, fig3_graph, mode, expected):
        q = parse_query(FIG3_QUERY, mode=mode)
        for order in enumerate_qvos(q):
            r, _ = run(fig3_graph, q, order)
            assert set(r.matchings) == expected and r.count == len(expected)

    def test_capacity(self, fig3_graph, fig3_iso):
        with pytest.raises(ConfigurationError, match="levels"):
            run(fig3_graph, fig3_iso, capacity=2)

    def test_bad_interval(self, fig3_graph, fig3_iso):
        with pytest.raises(ConfigurationError):
            run(fig3_graph, fig3_iso, interval=VertexInterval(0, 9))

    def test_bad_line_width(self, fig3_graph, fig3_iso):
        with pytest.raises(ConfigurationError):
            run(fig3_graph, fig3_iso, line_width=0)

    def test_undirected_needs_symmetric_graph(self, fig3_graph):
        q = parse_query(FIG3_QUERY, directed=False)
        with pytest.raises(ConfigurationError, match="symmetric"):
            run(fig3_graph, q)
        r, _ = run(make_undirected(fig3_graph), q)
        assert r.count == oracle.enumerate(make_undirected(fig3_graph), q).count

    def test_stats_shape(self, fig3_graph):
        q = reconstructed_query("q5", mode="hom")
        g = make_undirected(fig3_graph)
        _, stats = run(g, parse_query(q.edges, directed=False, mode="hom"))
        assert len(stats.intermediates) == len(stats.memory) == len(stats.compare_steps) == 3
        assert stats.source_edges == g.num_edges
        assert stats.compare_steps[0] == 0

    def test_count_only(self, fig3_graph, fig3_hom):
        r, _ = run(fig3_graph, fig3_hom, count_only=True)
        assert r.count == 6 and r.matchings == []


class TestRunParallel:
    def test_p1_equals_instance(self, fig3_graph, fig3_hom):
        plan = plan_query(fig3_hom, (0, 1, 2))
        r1, _ = run_instance(fig3_graph, plan)
        rp, stats = run_parallel(fig3_graph, plan, 1, stride=100)
        assert rp.matchings == r1.matchings and len(stats) == 1

    def test_p4_fig3(self, fig3_graph, fig3_iso):
        r, stats = run_parallel(fig3_graph, plan_query(fig3_iso, (0, 1, 2)), 4, stride=2)
        assert r.count == 2 and set(r.matchings) == FIG3_ISO
        assert sum(s.source_edges for s in stats) == 7

    def test_bad_arguments(self, fig3_graph, fig3_iso):
        plan = plan_query(fig3_iso, (0, 1, 2))
        with pytest.raises(ConfigurationError):
            run_parallel(fig3_graph, plan, 0)
        with pytest.raises(ConfigurationError):
            run_parallel(fig3_graph, plan, 2, stride=0)

    def test_joblib_workers(self, fig3_graph, fig3_hom):
        plan = plan_query(fig3_hom, (0, 1, 2))
        r, _ = run_parallel(fig3_graph, plan, 2, n_jobs=2)
        assert Counter(r.matchings) == Counter(FIG3_HOM)

    @settings(max_examples=25, deadline=None)
    @given(
        st.integers(0, 10_000),
        st.sampled_from(["q1", "q2", "q3", "q5"]),
        st.sampled_from(["hom", "iso"]),
        st.integers(1, 5),
        st.sampled_from([1, 3, 100]),
    )
    def test_partition_soundness(self, seed, name, mode, p, stride):
        g = build_csr(random_graph(18, 0.2, seed=seed))
        q = reconstructed_query(name, mode=mode)
        plan = plan_query(q, plannable_qvos(q)[0])
        full, _ = run_instance(g, plan)
        merged, stats = run_parallel(g, plan, p, stride)
        assert Counter(merged.matchings) == Counter(full.matchings)
        assert merged.count == full.count == sum(s.intermediates[-1] for s in stats)
        assert len(set(merged.matchings)) == len(merged.matchings)


class TestProperties:
    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 10_000), st.sampled_from(["q1", "q3", "q4", "q6"]), st.booleans())
    def test_iso_is_distinct_subset_of_hom(self, seed, name, directed):
        g = build_csr(random_graph(14, 0.3, seed=seed))
        if not directed:
            g = make_undirected(g)
        hom, _ = run(g, reconstructed_query(name, directed, "hom"))
        iso, _ = run(g, reconstructed_query(name, directed, "iso"))
        assert Counter(iso.matchings) == Counter(t for t in hom.matchings if len(set(t)) == len(t))

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 10_000), st.sampled_from(["q1", "q2", "q5", "q6"]), st.sampled_from(["hom", "iso"]))
    def test_toggles(self, seed, name, mode):
        g = build_csr(random_graph(16, 0.25, seed=seed))
        q = reconstructed_query(name, mode=mode)
        base, base_stats = run(g, q, caching=True, pruning=True)
        for caching in (True, False):
            for pruning in (True, False):
                r, stats = run(g, q, caching=caching, pruning=pruning)
                assert r.matchings == base.matchings
                if not pruning:
                    assert all(a <= b for a, b in zip(base_stats.intermediates, stats.intermediates))

    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 10_000), st.sampled_from(["q2", "q4", "q5"]))
    def test_qvo_invariance(self, seed, name):
        g = build_csr(random_graph(12, 0.3, seed=seed))
        q = reconstructed_query(name, mode="hom")
        results = {tuple(sorted(run(g, q, o)[0].matchings)) for o in plannable_qvos(q)}
        assert len(results) == 1

    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 10_000))
    def test_caching_never_adds_requests(self, seed):
        g = build_csr(random_graph(20, 0.3, seed=seed))
        q = reconstructed_query("q6", mode="hom")
        _, on = run(g, q, caching=True)
        _, off = run(g, q, caching=False)
        assert on.total_memory.total_requests <= off.total_memory.total_requests
        assert off.total_memory.cache_hits == 0
