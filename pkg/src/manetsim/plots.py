"""Static charts rendered purely from the per-figure CSVs.

One line chart per (metric, panel) with both protocols overlaid as
mean +/- stddev across seeds; regeneration needs only the CSV files, never
a re-simulation.
"""
from __future__ import annotations

import csv
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

AXIS_LABELS = {
    "mobility-pause": "pause time (s)",
    "node-density": "number of nodes",
    "send-rate": "send rate (packets/s)",
    "session-count": "number of sessions",
}

METRIC_LABELS = {
    "nro": "normalized routing overhead",
    "pdf": "packet delivery fraction",
    "cep": "consumed energy per packet (J)",
    "sdcen": "stddev of per-node consumed energy (J)",
    "mrer": "minimum residual energy ratio",
}


def _read_figure_csv(path: str):
    with open(path) as fh:
        rows = list(csv.DictReader(fh))
    series = {"dsr": ([], [], []), "meadsr": ([], [], [])}
    for row in rows:
        for proto in series:
            if row[f"{proto}_mean"] == "":
                continue
            xs, ys, es = series[proto]
            xs.append(float(row["point"]))
            ys.append(float(row[f"{proto}_mean"]))
            es.append(float(row[f"{proto}_std"]) if row[f"{proto}_std"] else 0.0)
    return series


def _parse_figure_name(filename: str):
    # fig_<metric>_vs_<axis>[_<panel>].csv
    stem = filename[len("fig_"):-len(".csv")]
    metric, _, rest = stem.partition("_vs_")
    for axis in AXIS_LABELS:
        if rest == axis:
            return metric, axis, ""
        if rest.startswith(axis + "_"):
            return metric, axis, rest[len(axis) + 1:]
    return metric, rest, ""


def emit_plots(results_dir: str, chart_dir: str | None = None) -> list[str]:
    """Render every fig_*.csv in results_dir to an SVG; returns chart paths."""
    if chart_dir is None:
        chart_dir = os.path.join(results_dir, "charts")
    names = sorted(n for n in os.listdir(results_dir)
                   if n.startswith("fig_") and n.endswith(".csv"))
    if not names:
        return []
    os.makedirs(chart_dir, exist_ok=True)
    written = []
    for name in names:
        metric, axis, panel = _parse_figure_name(name)
        series = _read_figure_csv(os.path.join(results_dir, name))
        fig, ax = plt.subplots(figsize=(5.0, 3.4))
        styles = {"dsr": ("o-", "DSR"), "meadsr": ("s--", "MEA-DSR")}
        for proto, (marker, label) in styles.items():
            xs, ys, es = series[proto]
            if not xs:
                continue
            if any(es):
                ax.errorbar(xs, ys, yerr=es, fmt=marker, capsize=3, label=label)
            else:
                ax.plot(xs, ys, marker, label=label)
        ax.set_xlabel(AXIS_LABELS.get(axis, axis))
        ax.set_ylabel(METRIC_LABELS.get(metric, metric))
        title = metric.upper()
        if panel:
            title += f" ({panel} speed)"
        ax.set_title(title)
        ax.legend()
        fig.tight_layout()
        out = os.path.join(chart_dir, name[:-len(".csv")] + ".svg")
        fig.savefig(out)
        plt.close(fig)
        written.append(out)
    return written
