"""Command-line entry point: ``hallspec [--seed N] [--out-dir DIR] <command> ...``.

Exit codes: 0 success, 1 invalid input, 2 verification failure, 3 I/O error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from hallspec.config import (
    ConfigError,
    Schedule,
    SweepConfig,
    apply_overrides,
    config_to_dict,
    load_config,
)
from hallspec.graph import GraphError
from hallspec.io import (
    IngestError,
    emit_csv,
    export_graph,
    ingest_embeddings,
    load_selection,
    read_csv,
    save_selection,
)
from hallspec.plotting import PLOTS, emit_svg
from hallspec.probability import ProbabilityError
from hallspec.sweep import SweepError, run_sweep
from hallspec.synthetic import generate_synthetic
from hallspec.verify import kl_residuals, pipeline_sandwich_cases, rayleigh_cases

EXIT_OK, EXIT_INVALID, EXIT_VERIFY, EXIT_IO = 0, 1, 2, 3

log = logging.getLogger("hallspec")


def _settings(args) -> tuple[SweepConfig, Schedule]:
    config, schedule = load_config(args.config) if args.config else (SweepConfig(), Schedule())
    overrides = {"seed": args.seed}
    for name in ("tau", "pair_count", "node_count", "plausible_fraction"):
        overrides[name] = getattr(args, name, None)
    return apply_overrides(config, **overrides), schedule


def _out_dir(args) -> Path:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_generate(args) -> int:
    config, schedule = _settings(args)
    inst = generate_synthetic(config, schedule.T0)
    out = _out_dir(args)
    export_graph(inst.graph, out / "graph.json")
    save_selection(inst.plausible, inst.pairs, out / "selection.json")
    (out / "config.json").write_text(json.dumps(config_to_dict(config, schedule), indent=1) + "\n")
    print(f"wrote {inst.graph.n_nodes} nodes, {len(inst.graph.edges)} edges, {len(inst.pairs)} pairs to {out}")
    return EXIT_OK


def _render(report, out: Path, plots) -> None:
    for plot in plots:
        emit_svg(report, out / f"{plot}.svg", plot)


def cmd_sweep(args) -> int:
    config, schedule = _settings(args)
    if args.graph:
        if not args.selection:
            raise ConfigError("--graph needs --selection")
        graph = ingest_embeddings(args.graph)
        plausible, pairs = load_selection(args.selection)
    else:
        inst = generate_synthetic(config, schedule.T0)
        graph, plausible, pairs = inst.graph, inst.plausible, inst.pairs
    report = run_sweep(graph, plausible, pairs, schedule, config)
    out = _out_dir(args)
    emit_csv(report, out / "sweep.csv")
    (out / "summary.json").write_text(json.dumps(report.summary, indent=1, sort_keys=True) + "\n")
    if report.rows:
        _render(report, out, PLOTS)
    s = report.summary
    print(
        f"{s['rows']} rows; lambda range [{s['lambda_min']:.4g}, {s['lambda_max']:.4g}]; "
        f"sandwich violations {s['sandwich_violations']}, decay violations {s['decay_violations']}"
    )
    return EXIT_OK if report.verified else EXIT_VERIFY


def _report_checks(results) -> int:
    for r in results:
        print(r.line())
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY


def cmd_verify_kl(args) -> int:
    return _report_checks([kl_residuals(args.cases, args.max_n, args.seed)])


def cmd_verify_bounds(args) -> int:
    return _report_checks(
        [rayleigh_cases(args.cases, args.seed), pipeline_sandwich_cases(args.pipeline_cases, args.seed)]
    )


def cmd_report(args) -> int:
    report = read_csv(args.csv)
    if not report.rows:
        raise ConfigError(f"{args.csv} has no data rows")
    out = _out_dir(args)
    _render(report, out, [args.plot] if args.plot else PLOTS)
    print(f"rendered {len(report.rows)} rows to {out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    def global_flags():
        # a fresh parent per parser: argparse shares action objects with parents,
        # so set_defaults on the top level would leak into the subcommands
        common = argparse.ArgumentParser(add_help=False)
        common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="random seed")
        common.add_argument("--out-dir", default=argparse.SUPPRESS, help="output directory (default: out)")
        common.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)
        return common

    parser = argparse.ArgumentParser(prog="hallspec", description=__doc__.splitlines()[0], parents=[global_flags()])
    parser.set_defaults(seed=None, out_dir="out", verbose=False)
    sub = parser.add_subparsers(dest="command", required=True)

    def with_config(p):
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--tau", type=float)
        p.add_argument("--pairs", dest="pair_count", type=int)
        p.add_argument("--nodes", dest="node_count", type=int)
        p.add_argument("--plausible-fraction", type=float)
        return p

    p = with_config(sub.add_parser("generate", parents=[global_flags()], help="write a synthetic graph and selection"))
    p.set_defaults(func=cmd_generate)

    p = with_config(sub.add_parser("sweep", parents=[global_flags()], help="run a temperature sweep"))
    p.add_argument("--graph", help="graph JSON (default: synthetic from config)")
    p.add_argument("--selection", help="selection JSON with plausible nodes and pairs")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify-kl", parents=[global_flags()], help="randomized KL decomposition check")
    p.add_argument("--cases", type=int, default=1000)
    p.add_argument("--max-n", type=int, default=64)
    p.set_defaults(func=cmd_verify_kl)

    p = sub.add_parser("verify-bounds", parents=[global_flags()], help="randomized Rayleigh-Ritz checks")
    p.add_argument("--cases", type=int, default=1000)
    p.add_argument("--pipeline-cases", type=int, default=200)
    p.set_defaults(func=cmd_verify_bounds)

    p = sub.add_parser("report", parents=[global_flags()], help="render SVG figures from a sweep CSV")
    p.add_argument("csv", help="sweep CSV")
    p.add_argument("--plot", choices=PLOTS)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if args.command.startswith("verify") and args.seed is None:
        args.seed = 0
    try:
        return args.func(args)
    except (ConfigError, IngestError, GraphError, ProbabilityError, SweepError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
