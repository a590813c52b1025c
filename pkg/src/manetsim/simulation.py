"""Wires one scenario + seed into a runnable simulation and executes it."""
from __future__ import annotations

import gc
from dataclasses import dataclass

from .airlink import Radio
from .dsr import DsrAgent
from .energy import EnergyLedger, to_fj
from .engine import SEC, EventLoop, RandomStreams, RunSummary
from .meadsr import MeaDsrAgent
from .metrics import LiveCounters, MetricsReport, compute_metrics
from .mobility import World
from .packets import DataPacket
from .scenario import DSR, Scenario
from .trace import Trace
from .traffic import Session, generate_sessions


@dataclass
class RunResult:
    scenario: Scenario
    seed: int
    report: MetricsReport
    summary: RunSummary
    trace_lines: list[str]
    sessions: list[Session]
    consumed_fj: list[int]
    initial_fj: list[int]

    def trace_text(self) -> str:
        return "\n".join(self.trace_lines) + "\n"


class Simulation:
    """One protocol, one scenario, one seed, one event loop."""

    def __init__(self, scenario: Scenario, seed: int,
                 positions: list[tuple[float, float]] | None = None):
        self.scenario = scenario
        self.seed = seed
        self.loop = EventLoop()
        self.rng = RandomStreams(seed)
        self.run_ns = round(scenario.run_length_s * SEC)
        self.counters = LiveCounters()
        self.sizes = scenario.sizes
        self.dsr_config = scenario.dsr
        self.mea_config = scenario.mea
        self.send_buffer_timeout_ns = round(scenario.send_buffer_timeout_s * SEC)
        self.backoff_initial_ns = round(scenario.backoff_initial_s * SEC)
        self.backoff_cap_ns = round(scenario.backoff_cap_s * SEC)
        self.max_routes_per_dst = 3

        self.ledger = EnergyLedger(scenario.node_count, scenario.energy.initial_j,
                                   scenario.energy.model())
        self.world = World.build(scenario.arena, scenario.node_count,
                                 scenario.mobility.pause_s, scenario.mobility.speed,
                                 self.rng, self.ledger, positions)
        self.trace = Trace(scenario.protocol)
        self.trace.header(
            scenario=scenario.name, hash=scenario.config_hash(),
            protocol=scenario.protocol, seed=seed,
            nodes=scenario.node_count, run_ns=self.run_ns,
            initial_fj=to_fj(scenario.energy.initial_j),
        )
        self.radio = Radio(self.loop, self.world, self.ledger, self.trace,
                           self.rng, scenario.link, self.counters)
        agent_cls = DsrAgent if scenario.protocol == DSR else MeaDsrAgent
        self.agents = [agent_cls(self, node) for node in range(scenario.node_count)]
        self.radio.deliver = self._deliver
        self.radio.link_failure = self._link_failure

        if scenario.traffic.sessions > 0:
            self.sessions = generate_sessions(
                scenario.traffic.sessions, scenario.node_count, scenario.traffic.rate,
                scenario.traffic.payload, scenario.traffic.start_window_s, self.rng)
        else:
            self.sessions = []
        self._uid = 0

    # -- radio callbacks ---------------------------------------------------

    def _deliver(self, node: int, frame, from_node: int) -> None:
        self.agents[node].on_receive(frame, from_node)

    def _link_failure(self, node: int, frame) -> None:
        self.agents[node].on_link_failure(frame)

    # -- event seeding -----------------------------------------------------

    def _seed_mobility(self) -> None:
        for node, mob in enumerate(self.world.mobilities):
            t = mob.next_change()
            if t <= self.run_ns:
                self.loop.schedule(t, self._mobility_event, (node,), kind="mobility-waypoint")

    def _mobility_event(self, node: int) -> None:
        mob = self.world.mobilities[node]
        t = mob.step(self.loop.now, self.rng)
        self.world.refresh(node)
        if t <= self.run_ns:
            self.loop.schedule(t, self._mobility_event, (node,), kind="mobility-waypoint")

    def _seed_traffic(self) -> None:
        for session in self.sessions:
            t = session.emission_time(0)
            if t < self.run_ns:
                self.loop.schedule(t, self._emit, (session, 0), kind="traffic-generation")

    def _emit(self, session: Session, k: int) -> None:
        pkt = DataPacket(uid=self._uid, flow=session.flow, src=session.src,
                         dst=session.dst, source_route=(), cursor=0,
                         payload_size=session.payload, generated_at=self.loop.now)
        self._uid += 1
        self.trace.gen(self.loop.now, session.src, session.flow, pkt.uid,
                       session.dst, session.payload)
        self.counters.data_generated += 1
        self.agents[session.src].send_data(pkt)
        t = session.emission_time(k + 1)
        if t < self.run_ns:
            self.loop.schedule(t, self._emit, (session, k + 1), kind="traffic-generation")

    # -- fault injection (tests, sensitivity studies) ------------------------

    def deplete_node(self, node: int, at_s: float) -> None:
        """Drain a node's battery at a given time; the charge is traced."""
        def drain():
            fj = self.ledger.drain(node)
            self.trace.charge(self.loop.now, node, "drain", fj)
        self.loop.schedule(round(at_s * SEC), drain, kind="timer-expiry")

    # -- execution ------------------------------------------------------------

    def run(self) -> RunResult:
        self._seed_mobility()
        self._seed_traffic()
        # the run allocates heavily but holds no cycles worth collecting
        gc_was_enabled = gc.isenabled()
        gc.disable()
        try:
            summary = self.loop.run_until(self.run_ns)
        finally:
            if gc_was_enabled:
                gc.enable()
        self.radio.sweep_unfinished(self.run_ns)
        for agent in self.agents:
            agent.sweep_buffer(self.run_ns)
        report = compute_metrics(self.counters.freeze(),
                                 list(self.ledger.consumed_fj),
                                 list(self.ledger.initial_fj))
        return RunResult(self.scenario, self.seed, report, summary,
                         self.trace.lines, self.sessions,
                         list(self.ledger.consumed_fj), list(self.ledger.initial_fj))


def run_single(scenario: Scenario, seed: int,
               positions: list[tuple[float, float]] | None = None) -> RunResult:
    return Simulation(scenario, seed, positions).run()
