"""Efficiency and centralities: exact values, properties, oracle parity."""

from fractions import Fraction

import networkx as nx
import numpy as np
import pytest

import oracle
from temponet.metrics import (
    sliding_efficiency,
    static_centralities,
    temporal_betweenness,
    temporal_closeness,
    temporal_efficiency,
    write_ranking_csv,
    write_series_csv,
)
from temponet.tgraph import StaticGraph, aggregate_static
from temponet.trace import SynthConfig, generate_synthetic

from conftest import A, B, C, D, E, F, graph_from_windows, random_windows


def complete_windows(n: int, T: int):
    full = {(u, v) for u in range(n) for v in range(n) if u != v}
    return [set(full) for _ in range(T)]


class TestEfficiency:
    def test_f1_exact(self, f1_graph):
        report = temporal_efficiency(f1_graph)
        assert report.average_exact == Fraction(13, 100)
        assert report.average == 0.13
        assert report.matrix[A][B] == 0.5
        assert report.matrix[F][A] == 0.0

    def test_complete_graph_is_one(self):
        g = graph_from_windows(4, complete_windows(4, 1))
        assert temporal_efficiency(g).average_exact == 1

    def test_empty_graph_is_zero(self):
        g = graph_from_windows(4, [set(), set()])
        assert temporal_efficiency(g).average_exact == 0

    def test_needs_two_nodes(self):
        g = graph_from_windows(1, [set()])
        with pytest.raises(ValueError):
            temporal_efficiency(g)

    def test_monotone_in_contacts(self):
        rng = np.random.default_rng(44)
        for _ in range(25):
            n = int(rng.integers(2, 7))
            T = int(rng.integers(1, 6))
            windows = random_windows(rng, n, T, 0.2)
            base = temporal_efficiency(graph_from_windows(n, windows)).average_exact
            # add one random missing edge somewhere
            k = int(rng.integers(T))
            candidates = [(u, v) for u in range(n) for v in range(n)
                          if u != v and (u, v) not in windows[k]]
            if not candidates:
                continue
            windows[k].add(candidates[int(rng.integers(len(candidates)))])
            grown = temporal_efficiency(graph_from_windows(n, windows)).average_exact
            assert grown >= base

    def test_oracle_equality(self):
        rng = np.random.default_rng(321)
        for _ in range(60):
            n = int(rng.integers(2, 8))
            T = int(rng.integers(1, 7))
            windows = random_windows(rng, n, T, float(rng.uniform(0.05, 0.5)))
            g = graph_from_windows(n, windows)
            assert temporal_efficiency(g).average_exact == oracle.efficiency(windows, n)


class TestSlidingEfficiency:
    def test_uniform_complete_graph_constant_one(self):
        from temponet.trace import ContactEvent, TraceMeta

        events = [ContactEvent(u, v, t, t)
                  for t in range(12) for u in range(3) for v in range(3) if u != v]
        meta = TraceMeta(n=3, t_min=0, t_max=12, scan_interval=1)
        series = sliding_efficiency(meta, events, 1, 4, 2)
        assert [v for _, v in series] == [1.0] * len(series)
        assert [t for t, _ in series] == [0, 2, 4, 6, 8]

    def test_contactless_position_is_zero(self):
        from temponet.trace import ContactEvent, TraceMeta

        events = [ContactEvent(0, 1, 0, 1)]
        meta = TraceMeta(n=2, t_min=0, t_max=20, scan_interval=1)
        series = sliding_efficiency(meta, events, 1, 5, 5)
        assert series[0][1] > 0
        assert all(v == 0.0 for _, v in series[1:])

    def test_span_exceeding_trace_single_point(self, f1_trace):
        series = sliding_efficiency(f1_trace.meta, f1_trace.events, 1, 100, 1)
        assert len(series) == 1
        assert series[0] == (0, 0.13)

    def test_stride_validation(self, f1_trace):
        with pytest.raises(ValueError):
            sliding_efficiency(f1_trace.meta, f1_trace.events, 2, 1, 2)


class TestCloseness:
    def test_f1_exact(self, f1_graph):
        ranking = temporal_closeness(f1_graph)
        assert ranking.scores_exact[A] == Fraction(19, 30)
        assert ranking.scores_exact[F] == 0
        assert ranking.order[0] == A
        assert ranking.rank[A] == 0

    def test_complete_graph_all_one(self):
        g = graph_from_windows(5, complete_windows(5, 2))
        assert all(s == 1 for s in temporal_closeness(g).scores_exact)

    def test_tie_break_ascending_id(self, f1_graph):
        ranking = temporal_closeness(f1_graph)
        # B and E tie exactly; B has the smaller id
        assert ranking.scores_exact[B] == ranking.scores_exact[E]
        assert ranking.rank[B] < ranking.rank[E]

    def test_monotone_in_contacts(self):
        rng = np.random.default_rng(45)
        for _ in range(25):
            n = int(rng.integers(2, 7))
            T = int(rng.integers(1, 6))
            windows = random_windows(rng, n, T, 0.2)
            base = temporal_closeness(graph_from_windows(n, windows)).scores_exact
            k = int(rng.integers(T))
            candidates = [(u, v) for u in range(n) for v in range(n)
                          if u != v and (u, v) not in windows[k]]
            if not candidates:
                continue
            windows[k].add(candidates[int(rng.integers(len(candidates)))])
            grown = temporal_closeness(graph_from_windows(n, windows)).scores_exact
            assert all(g >= b for g, b in zip(grown, base))

    def test_argmax_is_min_distance_sum(self):
        rng = np.random.default_rng(46)
        for _ in range(30):
            n = int(rng.integers(2, 8))
            windows = random_windows(rng, n, 5, 0.25)
            g = graph_from_windows(n, windows)
            ranking = temporal_closeness(g)
            from temponet.paths import all_pairs_distances

            win = all_pairs_distances(g).windows
            capped = np.where(win < 0, g.num_windows, win).sum(axis=1)
            assert ranking.order[0] == int(np.argmin(capped))

    def test_oracle_equality(self):
        rng = np.random.default_rng(654)
        for _ in range(60):
            n = int(rng.integers(2, 8))
            T = int(rng.integers(1, 7))
            windows = random_windows(rng, n, T, float(rng.uniform(0.05, 0.5)))
            g = graph_from_windows(n, windows)
            assert list(temporal_closeness(g).scores_exact) == oracle.closeness(windows, n)


class TestBetweenness:
    def test_f1_node_b(self, f1_graph):
        ranking = temporal_betweenness(f1_graph, per_window=True)
        assert ranking.scores_exact[B] == Fraction(1, 40)
        # receipt at window 1, holding through 2 and 3
        per_b = [row[B] for row in ranking.per_window]
        assert per_b == [0, Fraction(1, 20), Fraction(1, 20), Fraction(1, 20), 0, 0]

    def test_isolated_node_zero(self):
        windows = [{(0, 1)}, {(1, 2)}]
        g = graph_from_windows(4, windows)
        assert temporal_betweenness(g).scores_exact[3] == 0

    def test_star_hub_maximal(self):
        hub, leaves = 0, range(1, 5)
        star = {(hub, leaf) for leaf in leaves} | {(leaf, hub) for leaf in leaves}
        g = graph_from_windows(5, [set(star) for _ in range(3)])
        ranking = temporal_betweenness(g)
        assert all(ranking.scores_exact[hub] > ranking.scores_exact[leaf]
                   for leaf in leaves)

    def test_window_sum_equals_t_times_average(self, f1_graph):
        ranking = temporal_betweenness(f1_graph, per_window=True)
        T = f1_graph.num_windows
        for node in range(6):
            total = sum(row[node] for row in ranking.per_window)
            assert total == T * ranking.scores_exact[node]

    def test_denominator_variants(self):
        # two disjoint shortest paths 0→5: each middle carries one of two
        windows = [
            {(0, 1), (0, 2)},
            {(1, 5), (2, 5)},
        ]
        g = graph_from_windows(6, windows)
        through = temporal_betweenness(g, denominator="through-i")
        classic = temporal_betweenness(g, denominator="all")
        norm = Fraction(1, (6 - 1) * (6 - 2) * 2)
        assert through.scores_exact[1] == norm  # 1/1 holding window
        assert classic.scores_exact[1] == norm / 2  # 1/sigma_total
        with pytest.raises(ValueError):
            temporal_betweenness(g, denominator="bogus")

    def test_needs_three_nodes(self):
        g = graph_from_windows(2, [{(0, 1)}])
        with pytest.raises(ValueError):
            temporal_betweenness(g)

    def test_oracle_equality_both_denominators(self):
        rng = np.random.default_rng(987)
        for _ in range(40):
            n = int(rng.integers(3, 8))
            T = int(rng.integers(1, 7))
            windows = random_windows(rng, n, T, float(rng.uniform(0.05, 0.5)))
            g = graph_from_windows(n, windows)
            for denom in ("through-i", "all"):
                ranking = temporal_betweenness(g, denominator=denom, per_window=True)
                want_avg, want_win = oracle.betweenness(windows, n, denominator=denom)
                assert list(ranking.scores_exact) == want_avg
                assert [list(row) for row in ranking.per_window] == want_win


class TestStatic:
    def test_directed_path_midpoint(self):
        s = StaticGraph(n=3, edges=frozenset({(0, 1), (1, 2)}))
        bet, close = static_centralities(s)
        assert bet.scores[1] == 0.5
        assert close.scores_exact[0] == Fraction(1, 2)
        assert close.scores_exact[2] == 0

    def test_complete_graph_zero_betweenness(self):
        edges = {(u, v) for u in range(4) for v in range(4) if u != v}
        bet, _ = static_centralities(StaticGraph(n=4, edges=frozenset(edges)))
        assert bet.scores.tolist() == [0.0] * 4

    def test_f1_static_two_hop(self, f1_graph):
        static = aggregate_static(f1_graph)
        hops = oracle.static_hops(static.edges, 6)
        assert hops[A][F] == 2  # via the aggregated A→C→F route

    def test_matches_networkx(self):
        rng = np.random.default_rng(77)
        for _ in range(25):
            n = int(rng.integers(3, 9))
            edges = set()
            for u in range(n):
                for v in range(n):
                    if u != v and rng.random() < 0.3:
                        edges.add((u, v))
            s = StaticGraph(n=n, edges=frozenset(edges))
            bet, _ = static_centralities(s)
            dg = nx.DiGraph()
            dg.add_nodes_from(range(n))
            dg.add_edges_from(edges)
            want = nx.betweenness_centrality(dg, normalized=True)
            for node in range(n):
                assert bet.scores[node] == pytest.approx(want[node], abs=1e-12)

    def test_needs_three_nodes(self):
        with pytest.raises(ValueError):
            static_centralities(StaticGraph(n=2, edges=frozenset()))


class TestWriters:
    def test_ranking_csv(self, f1_graph, tmp_path):
        out = tmp_path / "r.csv"
        ranking = temporal_closeness(f1_graph)
        write_ranking_csv(ranking, out, metadata={"metric": "tclose"})
        lines = out.read_text().splitlines()
        assert lines[0] == "# metric: tclose"
        assert lines[1] == "node,score,rank"
        assert lines[2].startswith(f"{A},")
        assert lines[2].endswith(",0")

    def test_series_csv(self, tmp_path):
        out = tmp_path / "s.csv"
        write_series_csv([(0, 0.5), (10, 0.25)], out)
        assert out.read_text().splitlines() == [
            "t,efficiency", "0,0.5", "10,0.25",
        ]


def test_circadian_trace_oscillates_small():
    cfg = SynthConfig(nodes=8, days=3, day_contact_rate=0.8,
                      night_contact_rate=0.0, seed=2)
    tr = generate_synthetic(cfg)
    series = sliding_efficiency(tr.meta, tr.events, 3600, 86400, 3600)
    values = [v for _, v in series]
    # morning starts see a full active day sooner than evening starts
    assert max(values) > 2 * min(values) > 0
