"""Contact-trace ingestion and synthetic circadian trace generation.

A trace is an ordered list of directed device-to-device contacts plus a
small metadata record.  The on-disk format is a plain CSV with one record
per line, ``src,dst,t_start,t_end`` (integer seconds), ``#`` comment lines
and an optional ``src,dst,t_start,t_end`` header.  The writer embeds the
metadata (node count, span, scan interval) as comment lines so that
``parse_trace(write_trace(...))`` round-trips exactly; plain files without
those hints fall back to values derived from the records.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from ._io import text_sink, write_comments

__all__ = [
    "ContactEvent",
    "TraceMeta",
    "Trace",
    "SynthConfig",
    "TraceFormatError",
    "parse_trace",
    "write_trace",
    "generate_synthetic",
]

_HEADER = "src,dst,t_start,t_end"
_HINT_RE = re.compile(r"#\s*(nodes|scan_interval|t_min|t_max)\s*:\s*(\d+)\s*$")

SECONDS_PER_HOUR = 3600
SECONDS_PER_DAY = 86400

# Contacts between nodes in different clusters occur at 1/10 the base rate,
# which yields bridge-sparse but not disconnected synthetic clusters.
CROSS_CLUSTER_DIVISOR = 10

# Temporal resolution of generated traces.  Contact rates are per hour, so
# sub-hour windows carry no extra structure at desk scale.
SYNTH_SCAN_INTERVAL = 3600


class TraceFormatError(ValueError):
    """A trace file violates the record format or a record invariant."""


@dataclass(frozen=True)
class ContactEvent:
    """One directed contact: ``src`` scanned ``dst`` over [t_start, t_end].

    A reciprocal transmission during the same encounter is a separate
    record.  Zero-duration events are legal and occupy exactly the window
    containing ``t_start``.
    """

    src: int
    dst: int
    t_start: int
    t_end: int

    def __post_init__(self) -> None:
        if self.src == self.dst:
            raise ValueError(f"self-contact rejected: node {self.src}")
        if self.src < 0 or self.dst < 0:
            raise ValueError(f"negative node id in contact {self}")
        if self.t_start < 0:
            raise ValueError(f"negative start time in contact {self}")
        if self.t_start > self.t_end:
            raise ValueError(
                f"contact ends before it starts: {self.t_start} > {self.t_end}"
            )

    @property
    def effective_end(self) -> int:
        """End of the half-open interval the event occupies.

        Zero-duration sightings are widened to one second so they land in
        the window containing ``t_start``; an event ending exactly on a
        window boundary does not spill into the later window.
        """
        return max(self.t_end, self.t_start + 1)


@dataclass(frozen=True)
class TraceMeta:
    """Node count, time span and finest sensible window of a trace."""

    n: int
    t_min: int
    t_max: int
    scan_interval: int

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError(f"trace needs at least 2 nodes, got {self.n}")
        if self.t_min >= self.t_max:
            raise ValueError(f"empty span [{self.t_min}, {self.t_max})")
        if self.scan_interval <= 0:
            raise ValueError(f"scan_interval must be positive, got {self.scan_interval}")


@dataclass(frozen=True)
class Trace:
    meta: TraceMeta
    events: tuple[ContactEvent, ...]


@dataclass(frozen=True)
class SynthConfig:
    """Parameters of the synthetic circadian contact generator.

    Rates are expected contacts per node pair per hour.  ``day_window`` is
    the active period in hours-of-day; outside it the night rate applies.
    Pairs in different clusters contact at 1/10 of the base rate.
    """

    nodes: int
    days: int
    day_contact_rate: float
    night_contact_rate: float
    day_window: tuple[int, int] = (8, 20)
    cluster_count: int = 1
    seed: int = 0

    def __post_init__(self) -> None:
        if self.nodes < 2:
            raise ValueError(f"need at least 2 nodes, got {self.nodes}")
        if self.days < 1:
            raise ValueError(f"need at least 1 day, got {self.days}")
        start, end = self.day_window
        if not (0 <= start < end <= 24):
            raise ValueError(f"day window must satisfy 0 <= start < end <= 24, got {self.day_window}")
        if self.day_contact_rate < 0 or self.night_contact_rate < 0:
            raise ValueError("contact rates must be non-negative")
        if self.cluster_count < 1:
            raise ValueError(f"cluster_count must be >= 1, got {self.cluster_count}")

    def cluster_of(self, node: int) -> int:
        """Contiguous-block cluster assignment."""
        return node * self.cluster_count // self.nodes


def _sort_events(events: list[ContactEvent]) -> list[ContactEvent]:
    return sorted(events, key=lambda e: (e.t_start, e.src, e.dst))


def parse_trace(path) -> tuple[Trace, dict[int, int]]:
    """Read a contact CSV, returning the trace and the original→dense id map.

    Node ids are densely renumbered 0..N-1 (ascending original id) unless a
    ``# nodes:`` hint declares the node count, in which case ids must
    already lie in [0, N) and the mapping is the identity (this preserves
    isolated nodes through a write/parse round trip).
    """
    hints: dict[str, int] = {}
    raw: list[tuple[int, int, int, int]] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                m = _HINT_RE.match(line)
                if m:
                    hints[m.group(1)] = int(m.group(2))
                continue
            if line == _HEADER:
                continue
            parts = line.split(",")
            if len(parts) != 4:
                raise TraceFormatError(
                    f"{path}:{lineno}: expected 4 comma-separated fields, got {len(parts)}"
                )
            try:
                src, dst, t_start, t_end = (int(p) for p in parts)
            except ValueError:
                raise TraceFormatError(f"{path}:{lineno}: non-integer field in {line!r}") from None
            if src == dst:
                raise TraceFormatError(f"{path}:{lineno}: self-contact rejected ({src})")
            if src < 0 or dst < 0 or t_start < 0:
                raise TraceFormatError(f"{path}:{lineno}: negative value in {line!r}")
            if t_start > t_end:
                raise TraceFormatError(
                    f"{path}:{lineno}: record rejected, t_start {t_start} > t_end {t_end}"
                )
            raw.append((src, dst, t_start, t_end))

    if not raw:
        raise TraceFormatError(f"{path}: empty trace")

    ids = sorted({r[0] for r in raw} | {r[1] for r in raw})
    if "nodes" in hints:
        n = hints["nodes"]
        if ids[-1] >= n:
            raise TraceFormatError(
                f"{path}: node id {ids[-1]} exceeds declared node count {n}"
            )
        id_map = {i: i for i in ids}
    else:
        n = len(ids)
        id_map = {orig: dense for dense, orig in enumerate(ids)}

    events = _sort_events(
        [ContactEvent(id_map[s], id_map[d], a, b) for s, d, a, b in raw]
    )
    derived_min = min(e.t_start for e in events)
    derived_max = max(e.effective_end for e in events)
    t_min = hints.get("t_min", derived_min)
    t_max = hints.get("t_max", derived_max)
    if t_min > derived_min or t_max < derived_max:
        raise TraceFormatError(
            f"{path}: events outside declared span [{t_min}, {t_max})"
        )
    scan = hints.get("scan_interval", _infer_scan_interval(events))
    meta = TraceMeta(n=n, t_min=t_min, t_max=t_max, scan_interval=scan)
    return Trace(meta, tuple(events)), id_map


def _infer_scan_interval(events: list[ContactEvent]) -> int:
    """Smallest positive gap between distinct start times; 1 if degenerate."""
    starts = sorted({e.t_start for e in events})
    gaps = [b - a for a, b in zip(starts, starts[1:])]
    return min(gaps) if gaps else 1


def write_trace(path, trace: Trace, metadata: dict | None = None) -> None:
    """Write a trace CSV with metadata hint comments and a header line."""
    meta = trace.meta
    with text_sink(path) as fh:
        write_comments(fh, metadata)
        fh.write(f"# nodes: {meta.n}\n")
        fh.write(f"# t_min: {meta.t_min}\n")
        fh.write(f"# t_max: {meta.t_max}\n")
        fh.write(f"# scan_interval: {meta.scan_interval}\n")
        fh.write(_HEADER + "\n")
        for e in trace.events:
            fh.write(f"{e.src},{e.dst},{e.t_start},{e.t_end}\n")


def generate_synthetic(cfg: SynthConfig) -> Trace:
    """Sample a circadian contact trace from a piecewise-constant Poisson process.

    Each unordered node pair generates encounters at ``day_contact_rate``
    per hour inside ``day_window`` and ``night_contact_rate`` outside,
    scaled by 1/10 for cross-cluster pairs.  Every encounter emits both
    directed records with identical timestamps.  Output is a pure function
    of the config (bit-identical for equal seeds).
    """
    rng = np.random.default_rng(cfg.seed)
    start_h, end_h = cfg.day_window
    segments = [
        (0, start_h, cfg.night_contact_rate),
        (start_h, end_h, cfg.day_contact_rate),
        (end_h, 24, cfg.night_contact_rate),
    ]
    span = cfg.days * SECONDS_PER_DAY
    events: list[ContactEvent] = []
    for i in range(cfg.nodes - 1):
        for j in range(i + 1, cfg.nodes):
            mult = 1.0 if cfg.cluster_of(i) == cfg.cluster_of(j) else 1.0 / CROSS_CLUSTER_DIVISOR
            for day in range(cfg.days):
                day_base = day * SECONDS_PER_DAY
                for h0, h1, rate in segments:
                    lam = rate * mult * (h1 - h0)
                    if h1 <= h0 or lam <= 0:
                        continue
                    for _ in range(rng.poisson(lam)):
                        t0 = day_base + int(rng.uniform(h0 * SECONDS_PER_HOUR, h1 * SECONDS_PER_HOUR))
                        t1 = min(t0 + int(rng.integers(60, 601)), span)
                        events.append(ContactEvent(i, j, t0, t1))
                        events.append(ContactEvent(j, i, t0, t1))
    meta = TraceMeta(
        n=cfg.nodes, t_min=0, t_max=span, scan_interval=SYNTH_SCAN_INTERVAL
    )
    return Trace(meta, tuple(_sort_events(events)))
