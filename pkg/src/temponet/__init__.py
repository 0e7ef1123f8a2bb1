"""Temporal contact-network metrics and malware-containment simulation."""

from .metrics import (
    CentralityRanking,
    EfficiencyReport,
    sliding_efficiency,
    static_centralities,
    temporal_betweenness,
    temporal_closeness,
    temporal_efficiency,
)
from .paths import (
    PathOverflowError,
    ShortestPathRecord,
    SpanningTree,
    TemporalDistances,
    all_pairs_distances,
    shortest_path_records,
    temporal_bfs,
)
from .sim import (
    EpidemicRun,
    ExperimentResult,
    RunSummary,
    SimConfig,
    SweepAxes,
    SweepResult,
    run_epidemic,
    run_experiment,
    select_patch_nodes,
    summarize,
    sweep,
)
from .tgraph import (
    StaticGraph,
    TemporalGraph,
    aggregate_static,
    build_temporal,
    components_per_window,
)
from .trace import (
    ContactEvent,
    SynthConfig,
    Trace,
    TraceFormatError,
    TraceMeta,
    generate_synthetic,
    parse_trace,
    write_trace,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "ContactEvent", "TraceMeta", "Trace", "SynthConfig", "TraceFormatError",
    "parse_trace", "write_trace", "generate_synthetic",
    "TemporalGraph", "StaticGraph", "build_temporal", "aggregate_static",
    "components_per_window",
    "TemporalDistances", "SpanningTree", "ShortestPathRecord",
    "PathOverflowError", "temporal_bfs", "all_pairs_distances",
    "shortest_path_records",
    "EfficiencyReport", "CentralityRanking", "temporal_efficiency",
    "sliding_efficiency", "temporal_betweenness", "temporal_closeness",
    "static_centralities",
    "SimConfig", "EpidemicRun", "RunSummary", "ExperimentResult",
    "SweepAxes", "SweepResult", "select_patch_nodes", "run_epidemic",
    "summarize", "run_experiment", "sweep",
]
