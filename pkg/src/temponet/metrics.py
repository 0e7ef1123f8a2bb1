"""Temporal efficiency, temporal centralities and static baselines.

All temporal scores are accumulated with exact rational arithmetic and
converted to floats only for presentation, so small instances are
bit-comparable against brute-force oracles.  Distances enter every formula
in window counts, which makes the scores invariant to the window width:

* pair efficiency: 1 / (delivery_windows + 1), 0 when disconnected
* closeness: 1 - mean delivery (disconnection capped at the full span)
  normalized by the span, per node
* betweenness: per window, the fraction of shortest temporal paths on
  which a node just received or is still holding the message, averaged
  over windows

Static baselines (shortest-hop betweenness and closeness on the
aggregated graph) mirror the classic definitions with the same
normalizations.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._io import text_sink, write_comments
from .paths import (
    UNREACHABLE,
    _enumerate_pair,
    _reverse_best_arrival,
    all_pairs_delivery_windows,
)
from .tgraph import StaticGraph, TemporalGraph, build_temporal
from .trace import TraceMeta

__all__ = [
    "EfficiencyReport",
    "CentralityRanking",
    "temporal_efficiency",
    "sliding_efficiency",
    "temporal_betweenness",
    "temporal_closeness",
    "static_centralities",
    "write_ranking_csv",
    "write_series_csv",
    "BETWEENNESS_DENOMINATORS",
]

BETWEENNESS_DENOMINATORS = ("through-i", "all")


@dataclass(frozen=True)
class EfficiencyReport:
    """Pairwise and average temporal efficiency over one interval."""

    t_start: int
    t_end: int
    w: int
    matrix: np.ndarray
    average: float
    average_exact: Fraction


@dataclass(frozen=True)
class CentralityRanking:
    """Per-node scores plus a deterministic descending ranking.

    Ties break toward the smaller node id, so rankings are reproducible.
    ``scores_exact`` is present for the rationally-computed metrics;
    ``per_window`` optionally carries the per-window betweenness values.
    """

    metric: str
    scores: np.ndarray
    order: tuple[int, ...]
    rank: np.ndarray
    scores_exact: tuple[Fraction, ...] | None = None
    t_start: int | None = None
    t_end: int | None = None
    per_window: tuple[tuple[Fraction, ...], ...] | None = None

    @classmethod
    def build(cls, metric: str, scores, *, exact=None, t_start=None,
              t_end=None, per_window=None) -> "CentralityRanking":
        keys = exact if exact is not None else list(scores)
        order = tuple(sorted(range(len(keys)), key=lambda i: (-keys[i], i)))
        rank = np.empty(len(keys), dtype=np.int64)
        for pos, node in enumerate(order):
            rank[node] = pos
        return cls(
            metric=metric,
            scores=np.asarray(scores, dtype=np.float64),
            order=order,
            rank=rank,
            scores_exact=tuple(exact) if exact is not None else None,
            t_start=t_start,
            t_end=t_end,
            per_window=per_window,
        )

    def top(self, k: int) -> list[int]:
        return list(self.order[:k])


def temporal_efficiency(g: TemporalGraph) -> EfficiencyReport:
    """Average speed at which messages reach node pairs (1 = instant).

    Disconnected pairs contribute 0, so the measure degrades gracefully on
    sparse intervals; the average runs over all ordered pairs.
    """
    if g.n < 2:
        raise ValueError("temporal efficiency needs at least 2 nodes")
    windows = all_pairs_delivery_windows(g)
    n = g.n
    matrix = np.zeros((n, n), dtype=np.float64)
    total = Fraction(0)
    for i in range(n):
        for j in range(n):
            k = windows[i, j]
            if k == UNREACHABLE:
                continue
            value = Fraction(1, int(k) + 1)
            matrix[i, j] = float(value)
            if i != j:
                total += value
    average = total / (n * (n - 1))
    return EfficiencyReport(
        t_start=g.t_min, t_end=g.t_max, w=g.w, matrix=matrix,
        average=float(average), average_exact=average,
    )


def sliding_efficiency(meta: TraceMeta, events, w: int, span: int,
                       stride: int) -> list[tuple[int, float]]:
    """Average temporal efficiency of [t, t+span) as t slides over the trace.

    Positions advance by ``stride`` from the trace start; the last window
    is clipped to the trace end, and a span longer than the whole trace
    yields a single point.
    """
    if span < w:
        raise ValueError(f"span {span} must be at least one window ({w})")
    if stride < w:
        raise ValueError(f"stride {stride} must be at least one window ({w})")
    duration = meta.t_max - meta.t_min
    if span >= duration:
        g = build_temporal(meta, events, w)
        return [(meta.t_min, temporal_efficiency(g).average)]
    series: list[tuple[int, float]] = []
    t = meta.t_min
    while t + span <= meta.t_max:
        g = build_temporal(meta, events, w, (t, t + span))
        series.append((t, temporal_efficiency(g).average))
        t += stride
    return series


def temporal_closeness(g: TemporalGraph) -> CentralityRanking:
    """Rank nodes by how quickly they can deliver to everyone else.

    Score is 1 minus the mean delivery time normalized by the full span;
    unreachable destinations are charged the full span, so a node that can
    reach nobody scores 0 and one with instant contacts to all scores 1.
    """
    if g.n < 2:
        raise ValueError("temporal closeness needs at least 2 nodes")
    windows = all_pairs_delivery_windows(g)
    T = g.num_windows
    capped = np.where(windows == UNREACHABLE, T, windows)
    sums = capped.sum(axis=1)  # diagonal contributes 0
    exact = [Fraction(1) - Fraction(int(s), T * (g.n - 1)) for s in sums]
    return CentralityRanking.build(
        "temporal-closeness", [float(x) for x in exact], exact=exact,
        t_start=g.t_min, t_end=g.t_max,
    )


def temporal_betweenness(g: TemporalGraph, denominator: str = "through-i",
                         per_window: bool = False) -> CentralityRanking:
    """Rank nodes by presence (receipt + holding time) on shortest paths.

    For every ordered pair and every window, a node is credited with the
    number of the pair's shortest temporal paths on which it received in
    that window or is holding the message until a later forwarding
    contact.  The per-pair credit is divided by the number of paths
    through the node (``denominator="through-i"``, the definition used
    here) or by the pair's total shortest-path count (``"all"``, the
    classic convention), then normalized over pairs and averaged over
    windows.
    """
    if g.n < 3:
        raise ValueError("temporal betweenness needs at least 3 nodes")
    if denominator not in BETWEENNESS_DENOMINATORS:
        raise ValueError(f"unknown denominator {denominator!r}")
    n, T = g.n, g.num_windows
    delivery = all_pairs_delivery_windows(g)
    acc = [Fraction(0) for _ in range(n)]
    acc_win = [[Fraction(0) for _ in range(n)] for _ in range(T)] if per_window else None
    for dest in range(n):
        sources = [j for j in range(n)
                   if j != dest and delivery[j, dest] != UNREACHABLE]
        if not sources:
            continue
        rev_best = _reverse_best_arrival(g, dest)
        for src in sources:
            sigma, through = _enumerate_pair(
                g, src, dest, int(delivery[src, dest]), rev_best
            )
            for node, ranges in through.items():
                denom = len(ranges) if denominator == "through-i" else sigma
                held = sum(f - r for r, f in ranges)
                acc[node] += Fraction(held, denom)
                if acc_win is not None:
                    for r, f in ranges:
                        share = Fraction(1, denom)
                        for t in range(r, f):
                            acc_win[t][node] += share
    pair_norm = (n - 1) * (n - 2)
    exact = [a / (T * pair_norm) for a in acc]
    per_window_out = None
    if acc_win is not None:
        per_window_out = tuple(
            tuple(x / pair_norm for x in row) for row in acc_win
        )
    return CentralityRanking.build(
        "temporal-betweenness", [float(x) for x in exact], exact=exact,
        t_start=g.t_min, t_end=g.t_max, per_window=per_window_out,
    )


def _hop_distances(adj: list[list[int]], source: int, n: int) -> list[int]:
    dist = [-1] * n
    dist[source] = 0
    q = deque([source])
    while q:
        v = q.popleft()
        for u in adj[v]:
            if dist[u] < 0:
                dist[u] = dist[v] + 1
                q.append(u)
    return dist


def static_centralities(s: StaticGraph) -> tuple[CentralityRanking, CentralityRanking]:
    """Shortest-hop betweenness and closeness on the aggregated graph.

    Betweenness uses Brandes' exact dependency accumulation on the
    directed graph, normalized by (N-1)(N-2).  Closeness is 1 minus the
    mean hop distance normalized by N, with unreachable pairs capped at N
    hops.
    """
    n = s.n
    if n < 3:
        raise ValueError("static centralities need at least 3 nodes")
    adj = s.out_adj
    cb = [0.0] * n
    closeness_sums = [0] * n
    for source in range(n):
        # Brandes: BFS with path counting, then reverse dependency pass
        stack: list[int] = []
        preds: list[list[int]] = [[] for _ in range(n)]
        sigma = [0] * n
        sigma[source] = 1
        dist = [-1] * n
        dist[source] = 0
        q = deque([source])
        while q:
            v = q.popleft()
            stack.append(v)
            for u in adj[v]:
                if dist[u] < 0:
                    dist[u] = dist[v] + 1
                    q.append(u)
                if dist[u] == dist[v] + 1:
                    sigma[u] += sigma[v]
                    preds[u].append(v)
        delta = [0.0] * n
        while stack:
            u = stack.pop()
            for v in preds[u]:
                delta[v] += sigma[v] / sigma[u] * (1 + delta[u])
            if u != source:
                cb[u] += delta[u]
        closeness_sums[source] = sum(
            (d if d >= 0 else n) for i, d in enumerate(dist) if i != source
        )
    pair_norm = (n - 1) * (n - 2)
    bet_scores = [x / pair_norm for x in cb]
    close_exact = [
        Fraction(1) - Fraction(total, n * (n - 1)) for total in closeness_sums
    ]
    betweenness = CentralityRanking.build("static-betweenness", bet_scores)
    closeness = CentralityRanking.build(
        "static-closeness", [float(x) for x in close_exact], exact=close_exact
    )
    return betweenness, closeness


def write_ranking_csv(ranking: CentralityRanking, path,
                      metadata: dict | None = None) -> None:
    """Write ``node,score,rank`` rows in descending score order."""
    with text_sink(path) as fh:
        write_comments(fh, metadata)
        fh.write("node,score,rank\n")
        for pos, node in enumerate(ranking.order):
            fh.write(f"{node},{ranking.scores[node]!r},{pos}\n")


def write_series_csv(series: list[tuple[int, float]], path,
                     metadata: dict | None = None) -> None:
    """Write a ``t,efficiency`` time series."""
    with text_sink(path) as fh:
        write_comments(fh, metadata)
        fh.write("t,efficiency\n")
        for t, value in series:
            fh.write(f"{t},{value!r}\n")
