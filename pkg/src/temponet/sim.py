"""Trace-driven competitive contagion: malware vs. blocking or patch spreading.

One simulation advances window by window over the contact trace, windows
aligned to the earlier of the malware and patch start times.  Within a
window: seeds are applied first (patch seeds before malware seeds), then
every node infected (or, under the spreading scheme, patched) at the
window start transmits along each of its out-contacts; receptions are
applied simultaneously at the window end, a node offered both messages
taking the patch (configurable).  Patched is absorbing and heals infected
receivers.  With hop budget h > 1, transmission plus reception repeat up
to h-1 extra rounds inside the window so freshly reached nodes can relay.

Everything downstream is deterministic: replicate RNGs derive from
(base seed, cell index, replicate index, stream), so serial and parallel
execution produce identical results.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from enum import IntEnum
from itertools import product
from statistics import fmean

import numpy as np

from . import metrics
from ._io import text_sink, write_comments
from .tgraph import TemporalGraph, aggregate_static, build_temporal
from .trace import Trace

__all__ = [
    "STRATEGIES",
    "SCHEMES",
    "TIE_BREAKS",
    "NodeState",
    "SimConfig",
    "EpidemicRun",
    "RunSummary",
    "ExperimentResult",
    "SweepAxes",
    "SweepResult",
    "derive_rng",
    "select_patch_nodes",
    "run_epidemic",
    "summarize",
    "run_experiment",
    "sweep",
    "write_run_csv",
]

STRATEGIES = (
    "temporal-closeness",
    "temporal-betweenness",
    "static-closeness",
    "static-betweenness",
    "random",
)
SCHEMES = ("blocking", "spreading")
TIE_BREAKS = ("patch", "malware")

_STREAM_MALWARE = 0
_STREAM_PATCH = 1

SECONDS_PER_DAY = 86400


class NodeState(IntEnum):
    SUSCEPTIBLE = 0
    INFECTED = 1
    PATCHED = 2


def derive_rng(base_seed: int, cell_index: int, replicate: int,
               stream: int) -> np.random.Generator:
    """Replicate RNG: a pure function of (seed, cell, replicate, stream)."""
    seq = np.random.SeedSequence((base_seed, cell_index, replicate, stream))
    return np.random.Generator(np.random.PCG64(seq))


@dataclass(frozen=True)
class SimConfig:
    """One containment experiment: timing, seeding sizes, strategy, scheme.

    ``w`` defaults to the trace scan interval.  ``t_p`` may lie beyond the
    trace end, in which case the patch simply never arrives.
    """

    t_m: int
    t_p: int
    n_m: int
    n_p: int
    strategy: str = "temporal-closeness"
    scheme: str = "spreading"
    h: int = 1
    runs: int = 100
    seed: int = 0
    w: int | None = None
    tie: str = "patch"

    def validate(self, meta) -> None:
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.tie not in TIE_BREAKS:
            raise ValueError(f"unknown tie break {self.tie!r}")
        if not (meta.t_min <= self.t_m <= meta.t_max):
            raise ValueError(
                f"malware start {self.t_m} outside trace span "
                f"[{meta.t_min}, {meta.t_max}]"
            )
        if self.t_p < meta.t_min:
            raise ValueError(f"patch start {self.t_p} before trace start {meta.t_min}")
        if not (0 <= self.n_m <= meta.n):
            raise ValueError(f"n_m {self.n_m} outside [0, {meta.n}]")
        if not (0 <= self.n_p <= meta.n):
            raise ValueError(f"n_p {self.n_p} outside [0, {meta.n}]")
        if self.h < 1:
            raise ValueError(f"hop budget must be >= 1, got {self.h}")
        if self.runs < 1:
            raise ValueError(f"runs must be >= 1, got {self.runs}")
        if self.seed < 0:
            raise ValueError(f"seed must be non-negative, got {self.seed}")
        if self.w is not None and self.w <= 0:
            raise ValueError(f"window width must be positive, got {self.w}")

    def window_width(self, meta) -> int:
        return self.w if self.w is not None else meta.scan_interval


@dataclass(frozen=True)
class EpidemicRun:
    """Per-window state counts of one deterministic epidemic run."""

    n: int
    w: int
    t0: int
    t_m: int
    t_p: int
    counts: np.ndarray  # (windows, 3): infected, patched, susceptible
    final_states: np.ndarray
    replicate: int | None = None

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.w * np.arange(len(self.counts), dtype=np.int64)

    @property
    def infected(self) -> np.ndarray:
        return self.counts[:, 0]


@dataclass(frozen=True)
class RunSummary:
    """AUC (fraction·days), peak infected fraction, days to containment."""

    auc: float
    i_max: float
    tau_days: float  # math.inf when the infection never dies out

    @property
    def contained(self) -> bool:
        return math.isfinite(self.tau_days)


def select_patch_nodes(trace: Trace, cfg: SimConfig,
                       rng: np.random.Generator | None = None) -> list[int]:
    """Pick the initially patched nodes for one experiment.

    Centrality strategies rank nodes on the lookahead interval
    [t_p, trace end) — temporal metrics on its temporal graph, static ones
    on its aggregated graph — and take the top n_p.  The random strategy
    draws uniformly without replacement using ``rng`` (or a generator
    derived from the config seed).
    """
    meta = trace.meta
    cfg.validate(meta)
    if cfg.n_p == 0:
        return []
    if cfg.strategy == "random":
        if rng is None:
            rng = derive_rng(cfg.seed, 0, 0, _STREAM_PATCH)
        return [int(x) for x in rng.choice(meta.n, size=cfg.n_p, replace=False)]
    if cfg.t_p >= meta.t_max:
        raise ValueError(
            f"empty ranking interval [{cfg.t_p}, {meta.t_max})"
        )
    g = build_temporal(meta, trace.events, cfg.window_width(meta),
                       (cfg.t_p, meta.t_max))
    return _strategy_order(g, cfg.strategy)[:cfg.n_p]


def _strategy_order(g: TemporalGraph, strategy: str) -> list[int]:
    if strategy == "temporal-closeness":
        return list(metrics.temporal_closeness(g).order)
    if strategy == "temporal-betweenness":
        return list(metrics.temporal_betweenness(g).order)
    static_bet, static_close = metrics.static_centralities(aggregate_static(g))
    if strategy == "static-betweenness":
        return list(static_bet.order)
    if strategy == "static-closeness":
        return list(static_close.order)
    raise ValueError(f"unknown strategy {strategy!r}")


def _simulate(graph: TemporalGraph | None, n: int, w: int, t0: int,
              t_max: int, t_m: int, t_p: int, scheme: str, h: int, tie: str,
              patch_set, malware_set) -> tuple[np.ndarray, np.ndarray]:
    num_windows = graph.num_windows if graph is not None else 0
    states = np.zeros(n, dtype=np.uint8)
    counts = np.empty((num_windows, 3), dtype=np.int64)
    patch_arr = np.asarray(sorted(set(patch_set)), dtype=np.int64)
    mal_arr = np.asarray(sorted(set(malware_set)), dtype=np.int64)
    mal_win = (t_m - t0) // w
    pat_win = (t_p - t0) // w
    spreading = scheme == "spreading"
    inf_code, pat_code = NodeState.INFECTED, NodeState.PATCHED
    for k in range(num_windows):
        if k == pat_win and patch_arr.size:
            states[patch_arr] = pat_code
        if k == mal_win and mal_arr.size:
            fresh = mal_arr[states[mal_arr] != pat_code]
            states[fresh] = inf_code
        edges = graph.window_edges(k)
        if edges.size:
            for _ in range(h):
                src_states = states[edges[:, 0]]
                mal_dst = edges[src_states == inf_code, 1]
                pat_dst = edges[src_states == pat_code, 1] if spreading else None
                before = states.copy() if h > 1 else None
                if tie == "patch":
                    if pat_dst is not None and pat_dst.size:
                        states[pat_dst] = pat_code
                    if mal_dst.size:
                        hit = mal_dst[states[mal_dst] == NodeState.SUSCEPTIBLE]
                        states[hit] = inf_code
                else:
                    if mal_dst.size:
                        hit = mal_dst[states[mal_dst] == NodeState.SUSCEPTIBLE]
                        states[hit] = inf_code
                    if pat_dst is not None and pat_dst.size:
                        safe = pat_dst[~np.isin(pat_dst, mal_dst)]
                        states[safe] = pat_code
                if before is not None and np.array_equal(before, states):
                    break
        counts[k, 0] = int((states == inf_code).sum())
        counts[k, 1] = int((states == pat_code).sum())
        counts[k, 2] = n - counts[k, 0] - counts[k, 1]
    return counts, states


def run_epidemic(trace: Trace, cfg: SimConfig, patch_set, malware_set,
                 _graph: TemporalGraph | None = None,
                 replicate: int | None = None) -> EpidemicRun:
    """Run one deterministic epidemic with explicit seed sets.

    Overlapping seed sets resolve to patched.  Returns the per-window
    (infected, patched, susceptible) counts from min(t_m, t_p) to the
    trace end.
    """
    meta = trace.meta
    cfg.validate(meta)
    nodes = set(patch_set) | set(malware_set)
    if nodes and (min(nodes) < 0 or max(nodes) >= meta.n):
        raise ValueError("seed set contains out-of-range node ids")
    w = cfg.window_width(meta)
    t0 = min(cfg.t_m, cfg.t_p)
    graph = _graph
    if graph is None and t0 < meta.t_max:
        graph = build_temporal(meta, trace.events, w, (t0, meta.t_max))
    counts, final_states = _simulate(
        graph if t0 < meta.t_max else None,
        meta.n, w, t0, meta.t_max, cfg.t_m, cfg.t_p,
        cfg.scheme, cfg.h, cfg.tie, patch_set, malware_set,
    )
    return EpidemicRun(n=meta.n, w=w, t0=t0, t_m=cfg.t_m, t_p=cfg.t_p,
                       counts=counts, final_states=final_states,
                       replicate=replicate)


def summarize(run: EpidemicRun) -> RunSummary:
    """Reduce a run to AUC, peak infected fraction and containment time.

    Containment time counts from the patch start to the first window with
    zero infected after the outbreak (0 when there never is an outbreak,
    inf when the infection survives to the trace end).
    """
    infected = run.counts[:, 0] if len(run.counts) else np.zeros(0, dtype=np.int64)
    days_per_window = run.w / SECONDS_PER_DAY
    auc = float(infected.sum()) / run.n * days_per_window
    if not len(infected) or infected.max() == 0:
        return RunSummary(auc=auc, i_max=0.0, tau_days=0.0)
    i_max = float(infected.max()) / run.n
    outbreak = int(np.argmax(infected > 0))
    clear = np.nonzero(infected[outbreak:] == 0)[0]
    if not clear.size:
        return RunSummary(auc=auc, i_max=i_max, tau_days=math.inf)
    k0 = outbreak + int(clear[0])
    tau = max(0, run.t0 + run.w * k0 - run.t_p) / SECONDS_PER_DAY
    return RunSummary(auc=auc, i_max=i_max, tau_days=tau)


@dataclass(frozen=True)
class ExperimentResult:
    """Replicate-averaged summary of one (config, strategy) cell."""

    cfg: SimConfig
    auc_mean: float
    imax_mean: float
    tau_mean_days: float | None  # mean over contained runs, None if none
    containment_failure_frac: float
    summaries: tuple[RunSummary, ...]
    runs: tuple[EpidemicRun, ...] | None = None

    def record(self) -> dict:
        return {
            "strategy": self.cfg.strategy,
            "scheme": self.cfg.scheme,
            "t_m": self.cfg.t_m,
            "t_p": self.cfg.t_p,
            "n_m": self.cfg.n_m,
            "n_p": self.cfg.n_p,
            "runs": self.cfg.runs,
            "seed": self.cfg.seed,
            "auc_mean": self.auc_mean,
            "imax_mean": self.imax_mean,
            "tau_mean_days": self.tau_mean_days,
            "containment_failure_frac": self.containment_failure_frac,
        }


def run_experiment(trace: Trace, cfg: SimConfig, cell_index: int = 0,
                   keep_runs: bool = False,
                   patch_order: list[int] | None = None) -> ExperimentResult:
    """Monte-Carlo replicate loop for one cell.

    Malware seeds are drawn uniformly per replicate; the patch set is
    fixed per experiment for centrality strategies (``patch_order`` lets a
    sweep reuse a precomputed ranking) and re-drawn per replicate for the
    random strategy.
    """
    meta = trace.meta
    cfg.validate(meta)
    w = cfg.window_width(meta)
    t0 = min(cfg.t_m, cfg.t_p)
    graph = None
    if t0 < meta.t_max:
        graph = build_temporal(meta, trace.events, w, (t0, meta.t_max))
    patch: list[int] | None = None
    if cfg.strategy != "random":
        if patch_order is not None:
            patch = list(patch_order[:cfg.n_p])
        else:
            patch = select_patch_nodes(trace, cfg)
    summaries: list[RunSummary] = []
    runs: list[EpidemicRun] = []
    for r in range(cfg.runs):
        rng_m = derive_rng(cfg.seed, cell_index, r, _STREAM_MALWARE)
        malware = [int(x) for x in
                   rng_m.choice(meta.n, size=cfg.n_m, replace=False)]
        if cfg.strategy == "random":
            rng_p = derive_rng(cfg.seed, cell_index, r, _STREAM_PATCH)
            patch = select_patch_nodes(trace, cfg, rng=rng_p)
        run = run_epidemic(trace, cfg, patch, malware, _graph=graph,
                           replicate=r)
        summaries.append(summarize(run))
        if keep_runs:
            runs.append(run)
    contained = [s.tau_days for s in summaries if s.contained]
    return ExperimentResult(
        cfg=cfg,
        auc_mean=fmean(s.auc for s in summaries),
        imax_mean=fmean(s.i_max for s in summaries),
        tau_mean_days=fmean(contained) if contained else None,
        containment_failure_frac=1.0 - len(contained) / cfg.runs,
        summaries=tuple(summaries),
        runs=tuple(runs) if keep_runs else None,
    )


@dataclass(frozen=True)
class SweepAxes:
    """Grid of malware start times, patch delays and seeding sizes."""

    t_m: tuple[int, ...]
    delays: tuple[int, ...]
    n_m: tuple[int, ...]
    n_p: tuple[int, ...]

    def __post_init__(self) -> None:
        for name in ("t_m", "delays", "n_m", "n_p"):
            if not getattr(self, name):
                raise ValueError(f"sweep axis {name} is empty")


@dataclass(frozen=True)
class SweepResult:
    axes: SweepAxes
    strategies: tuple[str, ...]
    records: tuple[dict, ...]


def _sweep_cell(args) -> dict:
    trace, cfg, cell_index, patch_order = args
    result = run_experiment(trace, cfg, cell_index=cell_index,
                            patch_order=patch_order)
    return result.record()


def sweep(trace: Trace, base_cfg: SimConfig, axes: SweepAxes,
          strategies=STRATEGIES, threads: int = 0, sink=None) -> SweepResult:
    """Cartesian product of axes × strategies, one experiment per cell.

    Centrality rankings are computed once per distinct (strategy, t_p) and
    shared across cells.  Cells run serially or on a process pool; records
    are emitted to ``sink`` (JSON lines) in cell order either way, so the
    output is independent of the execution mode.
    """
    strategies = tuple(strategies)
    for s in strategies:
        if s not in STRATEGIES:
            raise ValueError(f"unknown strategy {s!r}")
    meta = trace.meta
    cells = []
    for index, (t_m, delay, n_m, n_p, strategy) in enumerate(
            product(axes.t_m, axes.delays, axes.n_m, axes.n_p, strategies)):
        cfg = replace(base_cfg, t_m=t_m, t_p=t_m + delay, n_m=n_m, n_p=n_p,
                      strategy=strategy)
        cfg.validate(meta)
        cells.append((index, cfg))

    w = base_cfg.window_width(meta)
    order_cache: dict[tuple[str, int], list[int]] = {}
    for _, cfg in cells:
        key = (cfg.strategy, cfg.t_p)
        if cfg.strategy == "random" or key in order_cache or cfg.n_p == 0:
            continue
        if cfg.t_p >= meta.t_max:
            raise ValueError(f"empty ranking interval [{cfg.t_p}, {meta.t_max})")
        g = build_temporal(meta, trace.events, w, (cfg.t_p, meta.t_max))
        order_cache[key] = _strategy_order(g, cfg.strategy)

    tasks = [
        (trace, cfg, index, order_cache.get((cfg.strategy, cfg.t_p)))
        for index, cfg in cells
    ]
    if threads == 0:
        threads = min(os.cpu_count() or 1, len(tasks))
    if threads <= 1 or len(tasks) <= 1:
        records = [_sweep_cell(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            chunk = max(1, len(tasks) // (threads * 4))
            records = list(pool.map(_sweep_cell, tasks, chunksize=chunk))
    if sink is not None:
        for rec in records:
            sink.write(json.dumps(rec) + "\n")
    return SweepResult(axes=axes, strategies=strategies,
                       records=tuple(records))


def write_run_csv(run: EpidemicRun, path, metadata: dict | None = None) -> None:
    """Dump one run as ``t_seconds,infected_frac,patched_frac,susceptible_frac``."""
    n = run.n
    with text_sink(path) as fh:
        write_comments(fh, metadata)
        fh.write("t_seconds,infected_frac,patched_frac,susceptible_frac\n")
        for t, (inf, pat, sus) in zip(run.times, run.counts):
            fh.write(f"{t},{inf / n!r},{pat / n!r},{sus / n!r}\n")
