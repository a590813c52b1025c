"""Command line entry points: run, suite, plot, validate."""
from __future__ import annotations

import argparse
import os
import sys

from .plots import emit_plots
from .runner import OUTDIR_ENV, PointResult, run_suite
from .scenario import (AXES, DSR, MEA_DSR, ScenarioError, SweepSuite,
                       build_suite, load_scenario)


def _outdir(arg: str | None, default: str) -> str:
    if arg:
        return arg
    return os.environ.get(OUTDIR_ENV, default)


def _print_rows(results: tuple[PointResult, ...]) -> None:
    for r in results:
        rep = r.report
        nro = f"{rep.nro:.3f}" if rep.nro is not None else "undef"
        cep = f"{rep.cep:.6f}" if rep.cep is not None else "undef"
        print(f"  {r.scenario.name:24s} {r.protocol:8s} seed={r.seed:<4d} "
              f"nro={nro} pdf={rep.pdf:.3f} cep={cep} "
              f"sdcen={rep.sdcen:.4f} mrer={rep.mrer:.4f}")


def cmd_run(args) -> int:
    scenario = load_scenario(args.scenario)
    suite = SweepSuite("node-density", 1.0, (scenario,))
    outdir = _outdir(args.out, f"out-{scenario.name}")
    result = run_suite(suite, protocols=(scenario.protocol,), jobs=args.jobs,
                       outdir=outdir, write_traces=not args.no_traces,
                       write_figures=False)
    _print_rows(result.results)
    print(f"results written to {outdir}/results.csv")
    return 0


def cmd_suite(args) -> int:
    protocols = tuple(args.protocols.split(","))
    for p in protocols:
        if p not in (DSR, MEA_DSR):
            print(f"unknown protocol {p!r}", file=sys.stderr)
            return 2
    seeds = tuple(range(1, args.seeds + 1))
    suite = build_suite(args.axis, scale=args.scale, seeds=seeds)
    outdir = _outdir(args.out, f"out-{args.axis}")
    result = run_suite(suite, protocols=protocols, jobs=args.jobs,
                       outdir=outdir, write_traces=not args.no_traces)
    _print_rows(result.results)
    print(f"{len(result.results)} runs; results written to {outdir}/results.csv")
    if args.plot:
        for path in emit_plots(outdir):
            print(f"chart: {path}")
    return 0


def cmd_plot(args) -> int:
    charts = emit_plots(args.results_dir)
    if not charts:
        print(f"no fig_*.csv files found in {args.results_dir}", file=sys.stderr)
        return 1
    for path in charts:
        print(f"chart: {path}")
    return 0


def cmd_validate(args) -> int:
    try:
        scenario = load_scenario(args.scenario)
    except ScenarioError as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return 1
    print(f"ok: {scenario.name} protocol={scenario.protocol} nodes={scenario.node_count} "
          f"run={scenario.run_length_s}s hash={scenario.config_hash()}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="manetsim",
        description="Deterministic MEA-DSR vs DSR network simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario file (its seeds, its protocol)")
    p_run.add_argument("scenario")
    p_run.add_argument("--out", default=None, help=f"output dir (or ${OUTDIR_ENV})")
    p_run.add_argument("--jobs", type=int, default=1)
    p_run.add_argument("--no-traces", action="store_true")
    p_run.set_defaults(func=cmd_run)

    p_suite = sub.add_parser("suite", help="run a standard sweep axis")
    p_suite.add_argument("axis", choices=AXES)
    p_suite.add_argument("--scale", type=float, default=0.5,
                         help="proportional shrink of arena/nodes/duration (default 0.5)")
    p_suite.add_argument("--seeds", type=int, default=10, help="seeds 1..N (default 10)")
    p_suite.add_argument("--protocols", default=f"{DSR},{MEA_DSR}")
    p_suite.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    p_suite.add_argument("--out", default=None, help=f"output dir (or ${OUTDIR_ENV})")
    p_suite.add_argument("--no-traces", action="store_true")
    p_suite.add_argument("--plot", action="store_true", help="render charts afterwards")
    p_suite.set_defaults(func=cmd_suite)

    p_plot = sub.add_parser("plot", help="render charts from an existing results dir")
    p_plot.add_argument("results_dir")
    p_plot.set_defaults(func=cmd_plot)

    p_val = sub.add_parser("validate", help="check a scenario file and print its hash")
    p_val.add_argument("scenario")
    p_val.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
