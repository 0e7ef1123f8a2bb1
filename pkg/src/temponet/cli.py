"""Command-line front end: gen, metrics, simulate and sweep subcommands.

The CLI only resolves flags and performs I/O; all behaviour lives in the
library modules.  Times on the command line are offsets from the trace
start, given either as raw seconds or in ``DdHh`` shorthand (``36h``,
``1d12h``).  Every output embeds a metadata record with the tool version,
the resolved flags and the seed, and contains no timestamps, so reruns
with identical flags produce identical bytes.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__, metrics, sim, tgraph, trace
from ._io import text_sink

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2

_DURATION_RE = re.compile(r"^(?:(\d+)d)?(?:(\d+)h)?$")

METRIC_CHOICES = (
    "teff", "sliding-teff", "tbet", "tclose", "sbet", "sclose", "components",
)


def parse_duration(text: str) -> int:
    """Seconds from a raw integer or ``DdHh`` shorthand (e.g. ``1d12h``)."""
    text = text.strip()
    if re.fullmatch(r"-?\d+", text):
        return int(text)
    m = _DURATION_RE.match(text)
    if not m or not (m.group(1) or m.group(2)):
        raise argparse.ArgumentTypeError(
            f"invalid duration {text!r} (use seconds or DdHh, e.g. 1d12h)"
        )
    days = int(m.group(1) or 0)
    hours = int(m.group(2) or 0)
    return days * 86400 + hours * 3600


def parse_axis(text: str, item=parse_duration) -> list[int]:
    """Comma-separated values with ``start:stop:step`` range items."""
    values: list[int] = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        if ":" in chunk:
            parts = chunk.split(":")
            if len(parts) != 3:
                raise argparse.ArgumentTypeError(
                    f"range item {chunk!r} must be start:stop:step"
                )
            lo, hi, step = (item(p) for p in parts)
            if step <= 0:
                raise argparse.ArgumentTypeError(f"step must be positive in {chunk!r}")
            values.extend(range(lo, hi, step))
        else:
            values.append(item(chunk))
    if not values:
        raise argparse.ArgumentTypeError(f"empty axis {text!r}")
    return values


def _time_axis(text: str) -> list[int]:
    return parse_axis(text, parse_duration)


def _count_axis(text: str) -> list[int]:
    return parse_axis(text, lambda s: int(s))


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _metadata(command: str, args: argparse.Namespace) -> dict:
    flags = {
        k: (str(v) if isinstance(v, Path) else v)
        for k, v in sorted(vars(args).items())
        if k != "func" and not k.startswith("_")
    }
    return {
        "version": __version__,
        "command": command,
        "seed": getattr(args, "seed", None),
        "flags": json.dumps(flags, sort_keys=True),
    }


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="temponet", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="base RNG seed")
    common.add_argument("--out", "-o", type=Path, default=None,
                        help="output file (default: stdout)")

    p_gen = sub.add_parser("gen", parents=[common],
                           help="generate a synthetic circadian trace")
    p_gen.add_argument("--nodes", type=int, required=True)
    p_gen.add_argument("--days", type=int, required=True)
    p_gen.add_argument("--day-rate", type=float, default=0.5,
                       help="daytime contacts per pair per hour")
    p_gen.add_argument("--night-rate", type=float, default=0.01,
                       help="nighttime contacts per pair per hour")
    p_gen.add_argument("--day-start", type=int, default=8)
    p_gen.add_argument("--day-end", type=int, default=20)
    p_gen.add_argument("--clusters", type=int, default=1)
    p_gen.set_defaults(func=cmd_gen)

    trace_common = _Parser(add_help=False)
    trace_common.add_argument("trace", type=Path, help="contact trace CSV")
    trace_common.add_argument("--window-secs", type=parse_duration, default=None,
                              help="window width (default: trace scan interval)")

    p_met = sub.add_parser("metrics", parents=[common, trace_common],
                           help="compute efficiency/centrality rankings")
    p_met.add_argument("--metric", choices=METRIC_CHOICES, required=True)
    p_met.add_argument("--from", dest="t_from", type=parse_duration, default=None,
                       help="interval start offset from trace start")
    p_met.add_argument("--to", dest="t_to", type=parse_duration, default=None,
                       help="interval end offset from trace start")
    p_met.add_argument("--span", type=parse_duration, default=86400,
                       help="sliding window span (sliding-teff)")
    p_met.add_argument("--stride", type=parse_duration, default=3600,
                       help="sliding window stride (sliding-teff)")
    p_met.add_argument("--betweenness-denominator", choices=metrics.BETWEENNESS_DENOMINATORS,
                       default="through-i")
    p_met.set_defaults(func=cmd_metrics)

    sim_common = _Parser(add_help=False)
    sim_common.add_argument("--nm", type=int, default=1,
                            help="initially infected node count")
    sim_common.add_argument("--np", dest="n_p", type=int, default=1,
                            help="initially patched node count")
    sim_common.add_argument("--scheme", choices=sim.SCHEMES, default="spreading")
    sim_common.add_argument("--runs", type=int, default=100)
    sim_common.add_argument("--h", dest="hops", type=int, default=1,
                            help="hops per window for both contagions")
    sim_common.add_argument("--tie", choices=sim.TIE_BREAKS, default="patch",
                            help="winner when patch and malware arrive together")

    p_sim = sub.add_parser("simulate", parents=[common, trace_common, sim_common],
                           help="run one containment experiment")
    p_sim.add_argument("--tm", type=parse_duration, required=True,
                       help="malware start offset from trace start")
    group = p_sim.add_mutually_exclusive_group()
    group.add_argument("--tp", type=parse_duration, default=None,
                       help="patch start offset from trace start")
    group.add_argument("--delay", type=parse_duration, default=None,
                       help="patch delay after malware start")
    p_sim.add_argument("--strategy", choices=sim.STRATEGIES,
                       default="temporal-closeness")
    p_sim.add_argument("--series-dir", type=Path, default=None,
                       help="directory for per-replicate time-series CSVs")
    p_sim.set_defaults(func=cmd_simulate)

    p_sweep = sub.add_parser("sweep", parents=[common, trace_common, sim_common],
                             help="sweep start times, delays and seed sizes")
    p_sweep.add_argument("--tm", type=_time_axis, required=True,
                         help="malware start offsets (comma list, lo:hi:step ranges)")
    p_sweep.add_argument("--delay", type=_time_axis, default=[0],
                         help="patch delays (comma list, lo:hi:step ranges)")
    p_sweep.add_argument("--nm-axis", dest="nm_axis", type=_count_axis, default=None,
                         help="N_m grid (defaults to --nm)")
    p_sweep.add_argument("--np-axis", dest="np_axis", type=_count_axis, default=None,
                         help="N_p grid (defaults to --np)")
    p_sweep.add_argument("--strategies", type=str, default="all",
                         help="comma list of strategies, or 'all'")
    p_sweep.add_argument("--threads", type=int, default=0,
                         help="parallel workers (0 = auto)")
    p_sweep.set_defaults(func=cmd_sweep)

    return parser


def cmd_gen(args) -> int:
    cfg = trace.SynthConfig(
        nodes=args.nodes,
        days=args.days,
        day_contact_rate=args.day_rate,
        night_contact_rate=args.night_rate,
        day_window=(args.day_start, args.day_end),
        cluster_count=args.clusters,
        seed=args.seed,
    )
    generated = trace.generate_synthetic(cfg)
    meta = _metadata("gen", args)
    trace.write_trace(args.out, generated, metadata=meta)
    summary = {
        "meta": meta,
        "trace": {
            "nodes": generated.meta.n,
            "t_min": generated.meta.t_min,
            "t_max": generated.meta.t_max,
            "scan_interval": generated.meta.scan_interval,
            "events": len(generated.events),
        },
    }
    if args.out is not None:
        side = Path(args.out).with_suffix(".meta.json")
        side.write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    else:
        print(json.dumps(summary), file=sys.stderr)
    return EXIT_OK


def _load_trace(args) -> trace.Trace:
    loaded, _ = trace.parse_trace(args.trace)
    meta_side = Path(args.trace).with_suffix(".meta.json")
    if meta_side.exists():
        side = json.loads(meta_side.read_text(encoding="utf-8"))
        scan = side.get("trace", {}).get("scan_interval")
        if scan and scan != loaded.meta.scan_interval:
            loaded = trace.Trace(
                replace(loaded.meta, scan_interval=int(scan)), loaded.events
            )
    return loaded


def _resolve_interval(args, meta) -> tuple[int, int]:
    t_a = meta.t_min + args.t_from if args.t_from is not None else meta.t_min
    t_b = meta.t_min + args.t_to if args.t_to is not None else meta.t_max
    return t_a, t_b


def cmd_metrics(args) -> int:
    data = _load_trace(args)
    meta = data.meta
    w = args.window_secs if args.window_secs is not None else meta.scan_interval
    header = _metadata("metrics", args)
    t_a, t_b = _resolve_interval(args, meta)

    if args.metric == "sliding-teff":
        window_meta = replace(meta, t_min=t_a, t_max=t_b)
        series = metrics.sliding_efficiency(
            window_meta, data.events, w, args.span, args.stride
        )
        metrics.write_series_csv(series, args.out, metadata=header)
        return EXIT_OK

    g = tgraph.build_temporal(meta, data.events, w, (t_a, t_b))
    if args.metric == "teff":
        report = metrics.temporal_efficiency(g)
        metrics.write_series_csv([(t_a, report.average)], args.out, metadata=header)
        return EXIT_OK
    if args.metric == "components":
        tgraph.write_components_csv(g, args.out, metadata=header)
        return EXIT_OK
    if args.metric == "tclose":
        ranking = metrics.temporal_closeness(g)
    elif args.metric == "tbet":
        ranking = metrics.temporal_betweenness(
            g, denominator=args.betweenness_denominator
        )
    else:
        static_bet, static_close = metrics.static_centralities(
            tgraph.aggregate_static(g)
        )
        ranking = static_bet if args.metric == "sbet" else static_close
    metrics.write_ranking_csv(ranking, args.out, metadata=header)
    return EXIT_OK


def _sim_config(args, meta, t_m: int, t_p: int, strategy: str) -> sim.SimConfig:
    return sim.SimConfig(
        t_m=t_m,
        t_p=t_p,
        n_m=args.nm,
        n_p=args.n_p,
        strategy=strategy,
        scheme=args.scheme,
        h=args.hops,
        runs=args.runs,
        seed=args.seed,
        w=args.window_secs,
        tie=args.tie,
    )


def cmd_simulate(args) -> int:
    data = _load_trace(args)
    meta = data.meta
    t_m = meta.t_min + args.tm
    if args.tp is not None:
        t_p = meta.t_min + args.tp
    else:
        t_p = t_m + (args.delay or 0)
    cfg = _sim_config(args, meta, t_m, t_p, args.strategy)
    result = sim.run_experiment(data, cfg, keep_runs=args.series_dir is not None)
    payload = {"meta": _metadata("simulate", args), **result.record()}
    with text_sink(args.out) as fh:
        fh.write(json.dumps(payload, indent=2) + "\n")
    if args.series_dir is not None:
        args.series_dir.mkdir(parents=True, exist_ok=True)
        for run in result.runs:
            sim.write_run_csv(
                run, args.series_dir / f"run_{run.replicate:04d}.csv",
                metadata=_metadata("simulate", args),
            )
    return EXIT_OK


def cmd_sweep(args) -> int:
    data = _load_trace(args)
    meta = data.meta
    if args.strategies.strip() == "all":
        strategies = sim.STRATEGIES
    else:
        strategies = tuple(s.strip() for s in args.strategies.split(",") if s.strip())
    axes = sim.SweepAxes(
        t_m=tuple(meta.t_min + t for t in args.tm),
        delays=tuple(args.delay),
        n_m=tuple(args.nm_axis) if args.nm_axis else (args.nm,),
        n_p=tuple(args.np_axis) if args.np_axis else (args.n_p,),
    )
    base = _sim_config(args, meta, meta.t_min, meta.t_min, strategies[0])
    with text_sink(args.out) as fh:
        fh.write(json.dumps({"meta": _metadata("sweep", args)}) + "\n")
        sim.sweep(data, base, axes, strategies=strategies,
                  threads=args.threads, sink=fh)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except trace.TraceFormatError as exc:
        print(f"temponet: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"temponet: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"temponet: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
