"""Windowed directed temporal graphs and their static aggregation.

A temporal graph over an interval [t_a, t_b) with window width ``w`` is an
ordered sequence of directed edge sets, one per half-open window
[t_a + w*k, t_a + w*(k+1)).  An edge (i, j) belongs to window k iff some
contact i→j overlaps that window; an event spanning several windows
appears in all of them.  The final window is truncated when the interval
length is not a multiple of ``w``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._io import text_sink, write_comments
from .trace import TraceMeta

__all__ = [
    "TemporalGraph",
    "StaticGraph",
    "build_temporal",
    "aggregate_static",
    "components_per_window",
    "write_snapshots_csv",
    "write_components_csv",
]


class TemporalGraph:
    """Immutable sequence of per-window directed edge sets over nodes 0..n-1.

    Snapshots are stored as per-window edge arrays sorted by (src, dst);
    derived access structures (per-edge window lists, receiver groupings
    for the all-pairs kernel) are built lazily and cached, which is safe
    because instances are never mutated after construction.
    """

    __slots__ = (
        "n", "w", "t_min", "t_max", "num_windows",
        "_edges", "_pairs", "_groups", "_edge_windows", "_out_adj",
        "_nonempty",
    )

    def __init__(self, n: int, w: int, t_min: int, t_max: int,
                 edges_per_window: list[np.ndarray]):
        if n < 1:
            raise ValueError(f"need at least one node, got {n}")
        if w <= 0:
            raise ValueError(f"window width must be positive, got {w}")
        if t_min >= t_max:
            raise ValueError(f"empty interval [{t_min}, {t_max})")
        self.n = n
        self.w = w
        self.t_min = t_min
        self.t_max = t_max
        self.num_windows = -((t_min - t_max) // w)
        if len(edges_per_window) != self.num_windows:
            raise ValueError(
                f"expected {self.num_windows} snapshots, got {len(edges_per_window)}"
            )
        self._edges: list[np.ndarray] = []
        for k, arr in enumerate(edges_per_window):
            arr = np.asarray(arr, dtype=np.int64).reshape(-1, 2)
            if arr.size:
                if arr.min() < 0 or arr.max() >= n:
                    raise ValueError(f"window {k}: node id out of range")
                if (arr[:, 0] == arr[:, 1]).any():
                    raise ValueError(f"window {k}: self-loop")
                arr = np.unique(arr, axis=0)
            arr.setflags(write=False)
            self._edges.append(arr)
        self._pairs: dict[int, list[tuple[int, int]]] = {}
        self._groups: dict[int, tuple[np.ndarray, np.ndarray, np.ndarray]] = {}
        self._edge_windows: dict[tuple[int, int], list[int]] | None = None
        self._out_adj: list[list[int]] | None = None
        self._nonempty: list[int] | None = None

    # -- snapshot access -----------------------------------------------

    def window_edges(self, k: int) -> np.ndarray:
        """Edge array of window ``k``, shape (m, 2), sorted by (src, dst)."""
        return self._edges[k]

    def edge_pairs(self, k: int) -> list[tuple[int, int]]:
        """Window ``k`` edges as python tuples (cached)."""
        pairs = self._pairs.get(k)
        if pairs is None:
            pairs = [(int(u), int(v)) for u, v in self._edges[k]]
            self._pairs[k] = pairs
        return pairs

    @property
    def nonempty_windows(self) -> list[int]:
        if self._nonempty is None:
            self._nonempty = [k for k, e in enumerate(self._edges) if e.size]
        return self._nonempty

    @property
    def edge_count(self) -> int:
        return sum(len(e) for e in self._edges)

    def window_bounds(self, k: int) -> tuple[int, int]:
        return (self.t_min + self.w * k,
                min(self.t_min + self.w * (k + 1), self.t_max))

    # -- derived structures ---------------------------------------------

    def receiver_groups(self, k: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Window ``k`` edges grouped by destination.

        Returns (srcs, group_starts, dsts): ``srcs`` re-ordered so that all
        transmitters of ``dsts[g]`` occupy srcs[group_starts[g]:group_starts[g+1]].
        Used by the vectorized all-pairs frontier propagation.
        """
        got = self._groups.get(k)
        if got is None:
            arr = self._edges[k]
            order = np.lexsort((arr[:, 0], arr[:, 1]))
            srcs = arr[order, 0]
            dst_sorted = arr[order, 1]
            dsts, starts = np.unique(dst_sorted, return_index=True)
            got = (srcs, starts, dsts)
            self._groups[k] = got
        return got

    @property
    def edge_windows(self) -> dict[tuple[int, int], list[int]]:
        """For each directed edge, the ascending list of windows it appears in."""
        if self._edge_windows is None:
            table: dict[tuple[int, int], list[int]] = {}
            for k in self.nonempty_windows:
                for uv in self.edge_pairs(k):
                    table.setdefault(uv, []).append(k)
            self._edge_windows = table
        return self._edge_windows

    @property
    def static_out_adj(self) -> list[list[int]]:
        """Union-over-windows out-neighbour lists (ascending)."""
        if self._out_adj is None:
            seen: list[set[int]] = [set() for _ in range(self.n)]
            for k in self.nonempty_windows:
                for u, v in self.edge_pairs(k):
                    seen[u].add(v)
            self._out_adj = [sorted(s) for s in seen]
        return self._out_adj


@dataclass(frozen=True)
class StaticGraph:
    """Aggregated static graph: union of all snapshot edge sets."""

    n: int
    edges: frozenset[tuple[int, int]]

    @property
    def out_adj(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in sorted(self.edges):
            adj[u].append(v)
        return adj


def build_temporal(meta: TraceMeta, events, w: int,
                   interval: tuple[int, int] | None = None) -> TemporalGraph:
    """Window a contact trace into a temporal graph.

    ``interval`` is a half-open [t_a, t_b) within the trace span and
    defaults to the full span.  Events are placed in every window their
    (half-open, zero-duration-widened) occupancy overlaps.
    """
    if w <= 0:
        raise ValueError(f"window width must be positive, got {w}")
    if interval is None:
        t_a, t_b = meta.t_min, meta.t_max
    else:
        t_a, t_b = interval
        if t_a >= t_b:
            raise ValueError(f"empty interval [{t_a}, {t_b})")
        if t_a < meta.t_min or t_b > meta.t_max:
            raise ValueError(
                f"interval [{t_a}, {t_b}) outside trace span [{meta.t_min}, {meta.t_max})"
            )
    num_windows = -((t_a - t_b) // w)
    per_window: list[set[tuple[int, int]]] = [set() for _ in range(num_windows)]
    for e in events:
        end = e.effective_end
        if end <= t_a or e.t_start >= t_b:
            continue
        first = max(0, (e.t_start - t_a) // w)
        last = min(num_windows - 1, (min(end, t_b) - 1 - t_a) // w)
        pair = (e.src, e.dst)
        for k in range(first, last + 1):
            per_window[k].add(pair)
    arrays = [
        np.array(sorted(s), dtype=np.int64).reshape(-1, 2) for s in per_window
    ]
    return TemporalGraph(meta.n, w, t_a, t_b, arrays)


def aggregate_static(g: TemporalGraph) -> StaticGraph:
    """Union of all snapshot edges, discarding time."""
    union: set[tuple[int, int]] = set()
    for k in g.nonempty_windows:
        union.update(g.edge_pairs(k))
    return StaticGraph(n=g.n, edges=frozenset(union))


def components_per_window(g: TemporalGraph) -> list[list[list[int]]]:
    """Weakly-connected components of every snapshot.

    Edge direction is ignored; isolated nodes appear as singletons.  Each
    window yields a partition of the node set, components ordered by their
    smallest member and listed ascending.
    """
    result = []
    for k in range(g.num_windows):
        parent = list(range(g.n))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for u, v in g.edge_pairs(k):
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[max(ru, rv)] = min(ru, rv)
        groups: dict[int, list[int]] = {}
        for node in range(g.n):
            groups.setdefault(find(node), []).append(node)
        result.append([groups[r] for r in sorted(groups)])
    return result


def write_snapshots_csv(g: TemporalGraph, path, metadata: dict | None = None) -> None:
    """Dump per-window edges as ``window,src,dst`` rows."""
    with text_sink(path) as fh:
        write_comments(fh, metadata)
        fh.write("window,src,dst\n")
        for k in range(g.num_windows):
            for u, v in g.edge_pairs(k):
                fh.write(f"{k},{u},{v}\n")


def write_components_csv(g: TemporalGraph, path, metadata: dict | None = None) -> None:
    """Dump per-window weak components as ``window,component_id,node`` rows."""
    comps = components_per_window(g)
    with text_sink(path) as fh:
        write_comments(fh, metadata)
        fh.write("window,component_id,node\n")
        for k, windows in enumerate(comps):
            for cid, comp in enumerate(windows):
                for node in comp:
                    fh.write(f"{k},{cid},{node}\n")
