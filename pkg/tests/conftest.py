"""Shared fixtures: the six-node F1 trace and random instance helpers.

F1 (nodes A..F = 0..5, unit windows, six windows) is built so that the
aggregated graph has a two-hop A→F route that is temporally infeasible,
the true temporal route is A→C→E→F, and the A→D route holds at B for
three windows.  Most exact expectations in the suite derive from it.
"""

from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from temponet.tgraph import TemporalGraph
from temponet.trace import ContactEvent, Trace, TraceMeta

A, B, C, D, E, F = range(6)

F1_EVENTS = (
    ContactEvent(C, F, 0, 0),
    ContactEvent(A, B, 1, 1),
    ContactEvent(A, C, 1, 1),
    ContactEvent(C, E, 2, 2),
    ContactEvent(E, F, 3, 3),
    ContactEvent(B, D, 4, 4),
    ContactEvent(D, E, 5, 5),
)

F1_WINDOW_EDGES = [
    {(C, F)},
    {(A, C), (A, B)},
    {(C, E)},
    {(E, F)},
    {(B, D)},
    {(D, E)},
]


@pytest.fixture
def f1_trace() -> Trace:
    return Trace(TraceMeta(n=6, t_min=0, t_max=6, scan_interval=1), F1_EVENTS)


@pytest.fixture
def f1_graph(f1_trace):
    from temponet.tgraph import build_temporal

    return build_temporal(f1_trace.meta, f1_trace.events, 1)


def graph_from_windows(n: int, windows, w: int = 1) -> TemporalGraph:
    """Build a temporal graph directly from per-window edge sets."""
    arrays = [
        np.array(sorted(edges), dtype=np.int64).reshape(-1, 2)
        for edges in windows
    ]
    return TemporalGraph(n, w, 0, w * len(windows), arrays)


def random_windows(rng: np.random.Generator, n: int, T: int, density: float):
    """Per-window directed edge sets with i.i.d. edge presence."""
    windows = []
    for _ in range(T):
        mask = rng.random((n, n)) < density
        np.fill_diagonal(mask, False)
        windows.append({(int(u), int(v)) for u, v in zip(*mask.nonzero())})
    return windows
