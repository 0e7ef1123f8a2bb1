"""Time-respecting shortest paths on windowed temporal graphs.

Message dynamics (one hop per window): a source holds its message from a
start window and may transmit in that window and any later one; every
other node may relay only from the window *after* it first received.  The
delivery window of a node is the earliest window in which it can receive;
a direct contact in the start window therefore delivers in that same
window.

Shortest-path enumeration treats a path as a sequence of distinct nodes
with a canonical timing: each hop uses the earliest feasible window given
the previous hop.  Two timings of the same node sequence count once.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass, field

import numpy as np

from ._io import text_sink, write_comments
from .tgraph import TemporalGraph

__all__ = [
    "TemporalDistances",
    "SpanningTree",
    "ShortestPathRecord",
    "PathOverflowError",
    "MAX_PATHS_PER_PAIR",
    "temporal_bfs",
    "all_pairs_delivery_windows",
    "all_pairs_distances",
    "shortest_path_records",
    "write_distances_csv",
]

UNREACHABLE = -1

# Exact betweenness needs exact path counts; refuse to continue rather than
# silently truncating when a pair's shortest-path set explodes.
MAX_PATHS_PER_PAIR = 10**6


class PathOverflowError(RuntimeError):
    """A node pair has more shortest temporal paths than the enumeration cap."""


@dataclass(frozen=True)
class TemporalDistances:
    """All-pairs shortest temporal delivery times.

    ``windows[i, j]`` is the delivery window index of j for a message
    starting at i in window 0, or -1 when (i, j) is temporally
    disconnected.  ``seconds`` converts to real delivery times (w × window,
    relative to the interval start) with ``inf`` for unreachable pairs.
    """

    w: int
    t_start: int
    windows: np.ndarray

    @property
    def n(self) -> int:
        return self.windows.shape[0]

    @property
    def seconds(self) -> np.ndarray:
        out = self.windows.astype(np.float64) * self.w
        out[self.windows == UNREACHABLE] = np.inf
        return out

    def reachable(self) -> np.ndarray:
        return self.windows != UNREACHABLE


@dataclass(frozen=True)
class SpanningTree:
    """Earliest-delivery tree of one source: parents and delivery windows."""

    source: int
    parent: np.ndarray
    delivery: np.ndarray


@dataclass(frozen=True)
class ShortestPathRecord:
    """All shortest temporal paths of one ordered pair, summarized per node.

    ``through`` maps each intermediate node to one (receipt, forward)
    window pair per shortest path it lies on: the node receives in
    ``receipt`` and holds every window up to (excluding) ``forward``, where
    the next node in the path receives.
    """

    source: int
    dest: int
    sigma_total: int
    delivery_window: int | None
    through: dict[int, list[tuple[int, int]]] = field(default_factory=dict)

    def pass_count(self, node: int) -> int:
        return len(self.through.get(node, ()))

    def incidence_windows(self, node: int) -> dict[int, int]:
        """window → number of shortest paths on which ``node`` holds then."""
        counts: dict[int, int] = {}
        for receipt, forward in self.through.get(node, ()):
            for t in range(receipt, forward):
                counts[t] = counts.get(t, 0) + 1
        return counts


def temporal_bfs(g: TemporalGraph, source: int, start_window: int = 0
                 ) -> tuple[np.ndarray, SpanningTree]:
    """Earliest delivery window of every node for one source.

    The source may transmit from ``start_window`` onward; any other node
    first reached in window k may relay from k+1.  Returns the delivery
    array (-1 for unreached) and the spanning tree of first deliveries,
    parents tie-broken toward the smallest transmitting node id.
    """
    if not (0 <= source < g.n):
        raise ValueError(f"source {source} out of range")
    if not (0 <= start_window < g.num_windows):
        raise ValueError(f"start window {start_window} out of range")
    delivery = np.full(g.n, UNREACHABLE, dtype=np.int64)
    parent = np.full(g.n, UNREACHABLE, dtype=np.int64)
    delivery[source] = start_window
    deliv = delivery  # local aliases for the hot loop
    unreached = g.n - 1
    for k in g.nonempty_windows:
        if k < start_window:
            continue
        if unreached == 0:
            break
        for u, v in g.edge_pairs(k):
            du = deliv[u]
            if du == UNREACHABLE or deliv[v] != UNREACHABLE:
                continue
            # u transmits in k only if it received earlier (or is the source)
            if du < k or u == source:
                deliv[v] = k
                parent[v] = u
                unreached -= 1
    return delivery, SpanningTree(source=source, parent=parent, delivery=delivery)


def all_pairs_delivery_windows(g: TemporalGraph) -> np.ndarray:
    """N×N earliest delivery windows, every source starting at window 0.

    Vectorized frontier propagation: one boolean reachability matrix is
    advanced window by window; destinations of a window are OR-reduced over
    their transmitters.  Work is O(N · Σ|E_k|) plus O(1) per empty window.
    """
    n = g.n
    delivery = np.full((n, n), UNREACHABLE, dtype=np.int64)
    np.fill_diagonal(delivery, 0)
    reached = np.eye(n, dtype=bool)
    remaining = n * (n - 1)
    for k in g.nonempty_windows:
        if remaining == 0:
            break
        srcs, starts, dsts = g.receiver_groups(k)
        grouped = np.logical_or.reduceat(reached[:, srcs], starts, axis=1)
        sub = reached[:, dsts]
        new = grouped & ~sub
        if new.any():
            rows, cols = new.nonzero()
            delivery[rows, dsts[cols]] = k
            reached[:, dsts] = sub | grouped
            remaining -= len(rows)
    return delivery


def all_pairs_distances(g: TemporalGraph) -> TemporalDistances:
    """All-pairs shortest temporal path lengths (seconds via ``.seconds``)."""
    return TemporalDistances(
        w=g.w, t_start=g.t_min, windows=all_pairs_delivery_windows(g)
    )


def _reverse_best_arrival(g: TemporalGraph, dest: int) -> np.ndarray:
    """Earliest window ``dest`` can receive from each (node, first-transmit-window).

    ``best[f, v]`` is the earliest delivery window at ``dest`` over all
    temporal walks leaving v no earlier than window f (loops cannot beat
    simple paths, so this equals the simple-path optimum).  Sentinel is
    ``num_windows`` (impossible).
    """
    T, n = g.num_windows, g.n
    best = np.full((T + 1, n), T, dtype=np.int64)
    nonempty = set(g.nonempty_windows)
    for f in range(T - 1, -1, -1):
        best[f] = best[f + 1]
        if f not in nonempty:
            continue
        row = best[f]
        nxt = best[f + 1]
        for u, v in g.edge_pairs(f):
            cand = f if v == dest else nxt[v]
            if cand < row[u]:
                row[u] = cand
    return best


def _enumerate_pair(g: TemporalGraph, source: int, dest: int, target: int,
                    rev_best: np.ndarray
                    ) -> tuple[int, dict[int, list[tuple[int, int]]]]:
    """Count shortest paths source→dest and collect per-node holding ranges.

    ``target`` is the known delivery window of the pair; ``rev_best`` is
    the reverse table for ``dest``.  A hop from a node with arrival a uses
    the earliest edge window ≥ a+1 (≥ start window for the source), and a
    branch survives only while its remainder can still reach ``dest`` by
    ``target`` — so the search touches little beyond the actual paths.
    """
    edge_windows = g.edge_windows
    out_adj = g.static_out_adj
    sigma = 0
    through: dict[int, list[tuple[int, int]]] = {}
    visited = {source}
    # trail of (node, receipt window) pairs, source carries its start window
    trail: list[tuple[int, int]] = [(source, 0)]

    def record() -> None:
        nonlocal sigma
        sigma += 1
        if sigma > MAX_PATHS_PER_PAIR:
            raise PathOverflowError(
                f"pair ({source}, {dest}) exceeds {MAX_PATHS_PER_PAIR} shortest paths"
            )
        for idx in range(1, len(trail) - 1):
            node, receipt = trail[idx]
            forward = trail[idx + 1][1]
            through.setdefault(node, []).append((receipt, forward))

    def dfs(v: int, lower: int) -> None:
        for u in out_adj[v]:
            if u in visited:
                continue
            wins = edge_windows[(v, u)]
            idx = bisect_left(wins, lower)
            if idx == len(wins):
                continue
            e = wins[idx]
            if u == dest:
                if e == target:
                    trail.append((u, e))
                    record()
                    trail.pop()
            elif e < target and rev_best[e + 1, u] <= target:
                visited.add(u)
                trail.append((u, e))
                dfs(u, e + 1)
                trail.pop()
                visited.remove(u)

    dfs(source, 0)
    return sigma, through


def shortest_path_records(g: TemporalGraph, source: int, dest: int
                          ) -> ShortestPathRecord:
    """Enumerate all shortest temporal paths of one ordered pair.

    Paths are distinct node sequences achieving the pair's delivery window
    under the canonical earliest-per-hop timing.  An unreachable pair
    yields ``sigma_total`` 0.  Raises :class:`PathOverflowError` beyond
    ``MAX_PATHS_PER_PAIR`` paths.
    """
    if source == dest:
        raise ValueError("source and dest must differ")
    delivery, _ = temporal_bfs(g, source, 0)
    target = int(delivery[dest])
    if target == UNREACHABLE:
        return ShortestPathRecord(source=source, dest=dest, sigma_total=0,
                                  delivery_window=None)
    rev_best = _reverse_best_arrival(g, dest)
    sigma, through = _enumerate_pair(g, source, dest, target, rev_best)
    return ShortestPathRecord(source=source, dest=dest, sigma_total=sigma,
                              delivery_window=target, through=through)


def write_distances_csv(dist: TemporalDistances, path,
                        metadata: dict | None = None) -> None:
    """Dump the distance matrix as ``src,dst,delivery_seconds`` rows."""
    windows = dist.windows
    with text_sink(path) as fh:
        write_comments(fh, metadata)
        fh.write("src,dst,delivery_seconds\n")
        for i in range(dist.n):
            for j in range(dist.n):
                if i == j:
                    continue
                k = windows[i, j]
                cell = "inf" if k == UNREACHABLE else str(int(k) * dist.w)
                fh.write(f"{i},{j},{cell}\n")
