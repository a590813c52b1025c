"""Multi-seed, multi-protocol suite execution and CSV results.

Runs are pure functions of (scenario, seed), so they may execute on a
process pool; rows are collected in a fixed order and all files are written
by the parent, which keeps every output byte-identical across reruns. The
results CSV is the single source of truth: per-figure CSVs and charts are
derived from it alone.
"""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .audit import audit_parsed, metrics_from_parsed, parse_trace
from .metrics import MetricsReport, aggregate
from .scenario import (DSR, MEA_DSR, MOBILITY_PAUSE, NODE_DENSITY, SEND_RATE,
                       SPEED_CLASSES, Scenario, SweepSuite)
from .simulation import run_single

RESULT_COLUMNS = (
    "record", "axis", "scenario", "point", "panel", "protocol", "seed",
    "config_hash", "nodes", "pause_s", "speed_lo", "speed_hi", "rate",
    "sessions", "run_s", "nro", "pdf", "cep", "sdcen", "mrer",
    "control_tx", "data_generated", "data_received", "total_energy_j",
    "undefined_runs",
)

OUTDIR_ENV = "MANETSIM_OUT"


@dataclass(frozen=True)
class PointResult:
    scenario: Scenario
    protocol: str
    seed: int
    report: MetricsReport
    problems: tuple[str, ...]


@dataclass(frozen=True)
class SuiteResult:
    axis: str
    results: tuple[PointResult, ...]

    def select(self, protocol: str = None, name: str = None) -> list[PointResult]:
        out = []
        for r in self.results:
            if protocol is not None and r.protocol != protocol:
                continue
            if name is not None and r.scenario.name != name:
                continue
            out.append(r)
        return out


def _run_point(args) -> PointResult:
    scenario, seed, outdir, audits, replay_check = args
    try:
        result = run_single(scenario, seed)
    except Exception as exc:
        raise RuntimeError(
            f"run aborted for (scenario={scenario.name}, protocol={scenario.protocol}, "
            f"seed={seed}): {exc}") from exc
    problems: list[str] = []
    if audits or replay_check:
        parsed = parse_trace(result.trace_lines)
        if audits:
            problems.extend(audit_parsed(parsed, result.consumed_fj,
                                         result.initial_fj))
        if replay_check:
            replayed = metrics_from_parsed(parsed)
            if replayed != result.report:
                problems.append(f"replay: {replayed} != {result.report}")
    if outdir is not None:
        path = os.path.join(outdir, f"trace-{scenario.config_hash()}-{seed}.log")
        with open(path, "w") as fh:
            fh.write(result.trace_text())
    return PointResult(scenario, scenario.protocol, seed, result.report, tuple(problems))


def run_suite(suite: SweepSuite, protocols=(DSR, MEA_DSR), jobs: int = 1,
              outdir: str | None = None, write_traces: bool = True,
              write_figures: bool = True, audits: bool = False,
              replay_check: bool = False) -> SuiteResult:
    if outdir is not None:
        os.makedirs(outdir, exist_ok=True)
    trace_dir = outdir if (outdir is not None and write_traces) else None
    tasks = []
    for point in suite.points:
        for protocol in protocols:
            scn = point.with_protocol(protocol)
            for seed in scn.seeds:
                tasks.append((scn, seed, trace_dir, audits, replay_check))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = tuple(pool.map(_run_point, tasks, chunksize=1))
    else:
        results = tuple(_run_point(task) for task in tasks)
    suite_result = SuiteResult(suite.axis, results)
    if outdir is not None:
        with open(os.path.join(outdir, "results.csv"), "w") as fh:
            fh.write(results_csv(suite_result))
        if write_figures:
            for name, text in figure_csvs(suite_result).items():
                with open(os.path.join(outdir, name), "w") as fh:
                    fh.write(text)
    return suite_result


# -- CSV rendering ------------------------------------------------------------

def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def point_value(scenario: Scenario, axis: str):
    if axis == MOBILITY_PAUSE:
        return scenario.mobility.pause_s
    if axis == NODE_DENSITY:
        return scenario.node_count
    if axis == SEND_RATE:
        return scenario.traffic.rate
    return scenario.traffic.sessions


def panel_label(scenario: Scenario, axis: str) -> str:
    if axis != MOBILITY_PAUSE:
        return ""
    for name, interval in SPEED_CLASSES.items():
        if scenario.mobility.speed == interval:
            return name
    lo, hi = scenario.mobility.speed
    return f"speed{lo}-{hi}"


def results_csv(suite_result: SuiteResult) -> str:
    axis = suite_result.axis
    lines = [",".join(RESULT_COLUMNS)]

    def common(scn: Scenario, protocol: str):
        return {
            "axis": axis, "scenario": scn.name,
            "point": point_value(scn, axis), "panel": panel_label(scn, axis),
            "protocol": protocol, "config_hash": scn.with_protocol(protocol).config_hash(),
            "nodes": scn.node_count, "pause_s": scn.mobility.pause_s,
            "speed_lo": scn.mobility.speed[0], "speed_hi": scn.mobility.speed[1],
            "rate": scn.traffic.rate, "sessions": scn.traffic.sessions,
            "run_s": scn.run_length_s,
        }

    def emit(fields: dict):
        lines.append(",".join(_fmt(fields.get(col)) for col in RESULT_COLUMNS))

    groups: dict[tuple[str, str], list[PointResult]] = {}
    order: list[tuple[str, str]] = []
    for r in suite_result.results:
        key = (r.scenario.name, r.protocol)
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append(r)

    for key in order:
        rows = groups[key]
        scn = rows[0].scenario
        base = common(scn, rows[0].protocol)
        for r in rows:
            fields = dict(base)
            fields.update(record="run", seed=r.seed,
                          nro=r.report.nro, pdf=r.report.pdf, cep=r.report.cep,
                          sdcen=r.report.sdcen, mrer=r.report.mrer,
                          control_tx=r.report.control_tx,
                          data_generated=r.report.data_generated,
                          data_received=r.report.data_received,
                          total_energy_j=r.report.total_energy_j)
            emit(fields)
        summary = aggregate([r.report for r in rows])
        undefined = summary["nro"].undefined
        for record, attr in (("mean", "mean"), ("std", "std"), ("min", "lo"), ("max", "hi")):
            fields = dict(base)
            fields.update(record=record, undefined_runs=undefined)
            for metric in ("nro", "pdf", "cep", "sdcen", "mrer"):
                fields[metric] = getattr(summary[metric], attr)
            emit(fields)
    return "\n".join(lines) + "\n"


def figure_csvs(suite_result: SuiteResult) -> dict[str, str]:
    """One CSV per (metric, panel): the mean curve of each protocol vs the axis."""
    axis = suite_result.axis
    by_panel: dict[str, dict] = {}
    for r in suite_result.results:
        panel = panel_label(r.scenario, axis)
        point = point_value(r.scenario, axis)
        cell = by_panel.setdefault(panel, {}).setdefault(point, {}).setdefault(r.protocol, [])
        cell.append(r.report)
    out: dict[str, str] = {}
    for metric in ("nro", "pdf", "cep", "sdcen", "mrer"):
        for panel, points in by_panel.items():
            suffix = f"_{panel}" if panel else ""
            name = f"fig_{metric}_vs_{axis}{suffix}.csv"
            lines = ["point,dsr_mean,dsr_std,dsr_n,meadsr_mean,meadsr_std,meadsr_n"]
            for point in sorted(points):
                row = [str(point)]
                for protocol in (DSR, MEA_DSR):
                    reports = points[point].get(protocol)
                    if reports:
                        summary = aggregate(reports)[metric]
                        row += [_fmt(summary.mean), _fmt(summary.std), str(summary.n)]
                    else:
                        row += ["", "", "0"]
                lines.append(",".join(row))
            out[name] = "\n".join(lines) + "\n"
    return out
