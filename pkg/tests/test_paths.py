"""Time-respecting shortest paths against the brute-force oracle."""

import numpy as np
import pytest

import oracle
from temponet import paths as tp
from temponet.paths import (
    MAX_PATHS_PER_PAIR,
    PathOverflowError,
    all_pairs_distances,
    shortest_path_records,
    temporal_bfs,
    write_distances_csv,
)
from temponet.tgraph import aggregate_static

from conftest import A, B, C, D, E, F, graph_from_windows, random_windows


class TestTemporalBfs:
    def test_f1_from_a(self, f1_graph):
        delivery, tree = temporal_bfs(f1_graph, A, 0)
        assert delivery.tolist() == [0, 1, 1, 4, 2, 3]
        assert tree.delivery.tolist() == delivery.tolist()

    def test_f1_from_f_only_self(self, f1_graph):
        delivery, _ = temporal_bfs(f1_graph, F, 0)
        assert delivery[F] == 0
        assert (delivery[:F] == -1).all()

    def test_source_reflexive(self, f1_graph):
        for s in range(6):
            for start in range(6):
                delivery, _ = temporal_bfs(f1_graph, s, start)
                assert delivery[s] == start

    def test_spanning_tree_edges_time_respecting(self):
        rng = np.random.default_rng(12)
        for _ in range(30):
            n = int(rng.integers(3, 8))
            g = graph_from_windows(n, random_windows(rng, n, 5, 0.25))
            src = int(rng.integers(n))
            delivery, tree = temporal_bfs(g, src, 0)
            for v in range(n):
                p = tree.parent[v]
                if p < 0:
                    continue
                k = int(delivery[v])
                assert (int(p), v) in set(g.edge_pairs(k))
                assert delivery[p] < k or p == src

    def test_invalid_args(self, f1_graph):
        with pytest.raises(ValueError):
            temporal_bfs(f1_graph, 99, 0)
        with pytest.raises(ValueError):
            temporal_bfs(f1_graph, 0, 6)


class TestAllPairs:
    def test_f1_row_a(self, f1_graph):
        dist = all_pairs_distances(f1_graph)
        assert dist.windows[A].tolist() == [0, 1, 1, 4, 2, 3]
        assert dist.windows[C][F] == 0
        assert dist.seconds[A][D] == 4.0
        assert dist.seconds[F][A] == np.inf

    def test_empty_graph_disconnected(self):
        g = graph_from_windows(4, [set(), set()])
        dist = all_pairs_distances(g)
        off_diag = ~np.eye(4, dtype=bool)
        assert (dist.windows[off_diag] == -1).all()
        assert np.diag(dist.windows).tolist() == [0, 0, 0, 0]

    def test_matches_per_source_bfs(self):
        rng = np.random.default_rng(5)
        for _ in range(40):
            n = int(rng.integers(2, 9))
            T = int(rng.integers(1, 7))
            g = graph_from_windows(n, random_windows(rng, n, T, float(rng.uniform(0.05, 0.5))))
            dist = all_pairs_distances(g)
            for s in range(n):
                delivery, _ = temporal_bfs(g, s, 0)
                assert (dist.windows[s] == delivery).all()

    def test_oracle_equality(self):
        rng = np.random.default_rng(100)
        for _ in range(150):
            n = int(rng.integers(2, 8))
            T = int(rng.integers(1, 7))
            windows = random_windows(rng, n, T, float(rng.uniform(0.05, 0.5)))
            g = graph_from_windows(n, windows)
            got = all_pairs_distances(g).windows
            want = oracle.distance_matrix(windows, n)
            for i in range(n):
                for j in range(n):
                    expect = -1 if want[i][j] is None else want[i][j]
                    assert got[i][j] == expect

    def test_triangle_consistency(self):
        rng = np.random.default_rng(17)
        for _ in range(30):
            n = int(rng.integers(3, 8))
            T = int(rng.integers(2, 7))
            g = graph_from_windows(n, random_windows(rng, n, T, 0.3))
            win = all_pairs_distances(g).windows
            for i in range(n):
                for j in range(n):
                    if i == j or win[i][j] < 0:
                        continue
                    for k in range(win[i][j] + 1, g.num_windows):
                        for (u, v) in g.edge_pairs(k):
                            if u == j and v != i:
                                assert 0 <= win[i][v] <= k

    def test_dominance_over_static(self):
        rng = np.random.default_rng(23)
        for _ in range(40):
            n = int(rng.integers(2, 8))
            T = int(rng.integers(1, 7))
            windows = random_windows(rng, n, T, float(rng.uniform(0.05, 0.5)))
            g = graph_from_windows(n, windows)
            static_dist = oracle.static_hops(aggregate_static(g).edges, n)
            win = all_pairs_distances(g).windows
            for i in range(n):
                delivery, tree = temporal_bfs(g, i, 0)
                for j in range(n):
                    if i == j:
                        continue
                    if win[i][j] >= 0:
                        # temporally reachable implies statically reachable,
                        # and the temporal route is never shorter in hops
                        assert static_dist[i][j] is not None
                        hops = 0
                        v = j
                        while v != i:
                            v = int(tree.parent[v])
                            hops += 1
                        assert hops >= static_dist[i][j]


class TestRecords:
    def test_f1_a_to_d(self, f1_graph):
        rec = shortest_path_records(f1_graph, A, D)
        assert rec.sigma_total == 1
        assert rec.delivery_window == 4
        assert rec.through == {B: [(1, 4)]}
        assert rec.incidence_windows(B) == {1: 1, 2: 1, 3: 1}
        assert rec.pass_count(B) == 1

    def test_f1_a_to_f(self, f1_graph):
        rec = shortest_path_records(f1_graph, A, F)
        assert rec.sigma_total == 1
        assert set(rec.through) == {C, E}
        assert rec.through[C] == [(1, 2)]
        assert rec.through[E] == [(2, 3)]

    def test_f1_unreachable(self, f1_graph):
        rec = shortest_path_records(f1_graph, F, A)
        assert rec.sigma_total == 0
        assert rec.delivery_window is None
        assert rec.through == {}

    def test_same_node_rejected(self, f1_graph):
        with pytest.raises(ValueError):
            shortest_path_records(f1_graph, A, A)

    def test_oracle_equality(self):
        rng = np.random.default_rng(200)
        for _ in range(80):
            n = int(rng.integers(3, 8))
            T = int(rng.integers(1, 7))
            windows = random_windows(rng, n, T, float(rng.uniform(0.05, 0.5)))
            g = graph_from_windows(n, windows)
            want = oracle.pair_records(windows, n)
            for i in range(n):
                for j in range(n):
                    if i == j:
                        continue
                    rec = shortest_path_records(g, i, j)
                    if (i, j) not in want:
                        assert rec.sigma_total == 0
                        continue
                    d, sigma, holds = want[(i, j)]
                    assert rec.delivery_window == d
                    assert rec.sigma_total == sigma
                    assert {k: sorted(v) for k, v in rec.through.items()} == \
                        {k: sorted(v) for k, v in holds.items()}

    def test_holding_ranges_contiguous(self):
        rng = np.random.default_rng(31)
        for _ in range(20):
            n = int(rng.integers(3, 7))
            g = graph_from_windows(n, random_windows(rng, n, 5, 0.35))
            for i in range(n):
                for j in range(n):
                    if i == j:
                        continue
                    rec = shortest_path_records(g, i, j)
                    for node, spans in rec.through.items():
                        for receipt, forward in spans:
                            assert receipt < forward <= (rec.delivery_window or 0)

    def test_overflow_cap(self, monkeypatch):
        assert MAX_PATHS_PER_PAIR == 10**6
        monkeypatch.setattr(tp, "MAX_PATHS_PER_PAIR", 3)
        # two-window ladder with 4 parallel middles: 4 shortest paths
        windows = [
            {(0, m) for m in range(1, 5)},
            {(m, 5) for m in range(1, 5)},
        ]
        g = graph_from_windows(6, windows)
        with pytest.raises(PathOverflowError):
            shortest_path_records(g, 0, 5)


def test_distances_csv(f1_graph, tmp_path):
    out = tmp_path / "d.csv"
    write_distances_csv(all_pairs_distances(f1_graph), out, metadata={"w": 1})
    lines = out.read_text().splitlines()
    assert lines[0] == "# w: 1"
    assert lines[1] == "src,dst,delivery_seconds"
    assert f"{F},{A},inf" in lines
    assert f"{C},{F},0" in lines
    assert len(lines) == 2 + 30
