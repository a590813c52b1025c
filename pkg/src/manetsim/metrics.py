"""The five run metrics plus cross-seed aggregation and trace replay.

nro    control transmissions per delivered data packet (every hop-level
       transmission of a request, reply or error counts once)
pdf    delivered fraction of generated data packets
cep    total consumed energy per delivered data packet, joules
sdcen  population standard deviation of per-node consumed energy, joules
mrer   minimum over nodes of residual/initial energy

When nothing was delivered, nro and cep are undefined (None), never
infinity, and pdf is zero. Aggregation excludes undefined values and
reports how many were excluded.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .energy import to_j
from .trace import parse_header


@dataclass(frozen=True)
class Counters:
    control_tx: int
    data_generated: int
    data_received: int


@dataclass
class LiveCounters:
    """Mutable in-run tally, frozen into Counters when the run ends."""

    control_tx: int = 0
    data_generated: int = 0
    data_received: int = 0

    def freeze(self) -> Counters:
        return Counters(self.control_tx, self.data_generated, self.data_received)


@dataclass(frozen=True)
class MetricsReport:
    nro: float | None
    pdf: float
    cep: float | None
    sdcen: float
    mrer: float
    control_tx: int
    data_generated: int
    data_received: int
    total_energy_j: float


def population_stddev(values: list[float]) -> float:
    n = len(values)
    mean = sum(values) / n
    return math.sqrt(sum((v - mean) ** 2 for v in values) / n)


def compute_metrics(counters: Counters, consumed_fj: list[int],
                    initial_fj: list[int]) -> MetricsReport:
    """Pure function of integer counters and ledgers; both the live run and
    the trace replay call this, so agreement is down to the inputs."""
    received = counters.data_received
    total_fj = sum(consumed_fj)
    total_j = to_j(total_fj)
    consumed_j = [to_j(fj) for fj in consumed_fj]
    nro = counters.control_tx / received if received > 0 else None
    pdf = received / counters.data_generated if counters.data_generated > 0 else 0.0
    cep = total_j / received if received > 0 else None
    sdcen = population_stddev(consumed_j)
    mrer = min((ini - con) / ini for ini, con in zip(initial_fj, consumed_fj))
    return MetricsReport(nro, pdf, cep, sdcen, mrer, counters.control_tx,
                         counters.data_generated, received, total_j)


# -- cross-seed aggregation ------------------------------------------------------

@dataclass(frozen=True)
class MetricSummary:
    mean: float | None
    std: float | None
    lo: float | None
    hi: float | None
    n: int
    undefined: int


AGGREGATED = ("nro", "pdf", "cep", "sdcen", "mrer")


def aggregate(reports: list[MetricsReport]) -> dict[str, MetricSummary]:
    if not reports:
        raise ValueError("nothing to aggregate")
    out = {}
    for name in AGGREGATED:
        values = [getattr(r, name) for r in reports]
        defined = [v for v in values if v is not None]
        undefined = len(values) - len(defined)
        if defined:
            out[name] = MetricSummary(
                mean=sum(defined) / len(defined),
                std=population_stddev(defined),
                lo=min(defined), hi=max(defined),
                n=len(defined), undefined=undefined,
            )
        else:
            out[name] = MetricSummary(None, None, None, None, 0, undefined)
    return out


# -- independent replay from the trace --------------------------------------------

CONTROL_KINDS = ("rreq", "rrep", "rerr")


def recompute_from_trace(lines: list[str]) -> MetricsReport:
    """Rebuild counters and ledgers purely from trace lines and recompute."""
    header = parse_header(lines)
    node_count = int(header["nodes"])
    initial_fj = [int(header["initial_fj"])] * node_count
    consumed_fj = [0] * node_count
    control_tx = 0
    generated = 0
    received = 0
    for line in lines:
        if line.startswith("#"):
            continue
        tok = line.split(" ", 4)
        ev = tok[1]
        if ev == "e=chg":
            # layout: t= e=chg n= w= fj=
            consumed_fj[int(tok[2][2:])] += int(tok[4][3:])
        elif ev == "e=tx":
            if tok[3] != "k=data":
                control_tx += 1
        elif ev == "e=gen":
            generated += 1
        elif ev == "e=deliver":
            received += 1
    return compute_metrics(Counters(control_tx, generated, received),
                           consumed_fj, initial_fj)
