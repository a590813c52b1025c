"""Shared builders: static topologies with injected positions and traffic."""
from __future__ import annotations

import pytest

from manetsim.engine import SEC
from manetsim.mobility import Arena
from manetsim.packets import DataPacket
from manetsim.scenario import (EnergyConfig, MobilityConfig, Scenario,
                               TrafficConfig)
from manetsim.simulation import Simulation
from manetsim.airlink import LinkLayerConfig


def static_scenario(protocol: str, node_count: int, run_s: float = 10.0,
                    interference: str = "none", jitter_s: float = 0.0,
                    retry_backoff_s: float = 0.0, arena=None,
                    **overrides) -> Scenario:
    """A network that never moves (pause covers the run) with no traffic;
    tests inject packets explicitly. Deterministic link timing by default."""
    return Scenario(
        name="static-test",
        node_count=node_count,
        run_length_s=run_s,
        protocol=protocol,
        arena=arena or Arena(2000.0, 2000.0, 250.0),
        mobility=MobilityConfig(pause_s=run_s + 1.0),
        traffic=TrafficConfig(sessions=0),
        link=LinkLayerConfig(interference_mode=interference,
                             broadcast_jitter_max_s=jitter_s,
                             retry_backoff_max_s=retry_backoff_s),
        **overrides,
    )


def build_sim(scenario: Scenario, positions, seed: int = 1) -> Simulation:
    return Simulation(scenario, seed, positions=list(positions))


def inject(sim: Simulation, src: int, dst: int, at_s: float,
           payload: int = 512, flow: int = 0) -> int:
    """Schedule one data packet; returns the uid it will carry."""
    uid = sim._uid
    sim._uid += 1

    def emit():
        pkt = DataPacket(uid=uid, flow=flow, src=src, dst=dst, source_route=(),
                         cursor=0, payload_size=payload,
                         generated_at=sim.loop.now)
        sim.trace.gen(sim.loop.now, src, flow, uid, dst, payload)
        sim.counters.data_generated += 1
        sim.agents[src].send_data(pkt)

    sim.loop.schedule(round(at_s * SEC), emit, kind="traffic-generation")
    return uid


LINE4 = [(0.0, 0.0), (200.0, 0.0), (400.0, 0.0), (600.0, 0.0)]

# source 0, relay 1, upper relay 2 and lower relay 3 both bridging to 4
DIAMOND = [(0.0, 0.0), (200.0, 0.0), (400.0, 0.0), (400.0, 150.0), (600.0, 0.0)]


def tx_lines(sim_or_lines, kind: str = None, node: int = None) -> list[str]:
    lines = sim_or_lines if isinstance(sim_or_lines, list) else sim_or_lines.trace.lines
    out = []
    for line in lines:
        if " e=tx " not in line:
            continue
        if kind is not None and f" k={kind} " not in line:
            continue
        if node is not None and f" n={node} " not in line:
            continue
        out.append(line)
    return out


def event_lines(lines: list[str], event: str, **fields) -> list[str]:
    needles = [f" e={event} "] + [f" {k}={v}" for k, v in fields.items()]
    return [ln for ln in lines if all(n in ln + " " for n in needles)]


@pytest.fixture
def line4_dsr():
    scn = static_scenario("dsr", 4)
    return build_sim(scn, LINE4)


@pytest.fixture
def line4_mea():
    scn = static_scenario("mea-dsr", 4)
    return build_sim(scn, LINE4)
