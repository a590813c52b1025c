"""Baseline DSR node behavior.

Flooded requests with strict duplicate drop, destination and cache-based
replies, source-routed forwarding with salvaging, and route-error reports
travelling upstream. Nodes relaying a reply learn the sub-route from
themselves to the reply's destination, which is what later makes cache
replies and salvaging possible at intermediate nodes.
"""
from __future__ import annotations

from dataclasses import dataclass

from .packets import DATA, PRIMARY, DataPacket, Rrep, Rreq, loop_free
from .routing import RoutingAgent
from .tables import FIRST
from .trace import ident_data


@dataclass(frozen=True)
class DsrConfig:
    max_salvage_count: int = 15
    reply_from_cache: bool = True

    def __post_init__(self):
        if self.max_salvage_count < 0:
            raise ValueError("max_salvage_count must be non-negative")


class DsrAgent(RoutingAgent):
    cache_mode = "dsr"
    carries_energy = False

    def __init__(self, sim, node: int):
        super().__init__(sim, node)
        self.config: DsrConfig = sim.dsr_config

    def handle_rreq(self, rreq: Rreq, from_node: int) -> None:
        if rreq.src == self.node:
            return
        status, _entry = self.rreq_table.record(
            rreq.src, rreq.seq, from_node, len(rreq.route_record) + 1)
        if status != FIRST:
            return  # intermediate nodes drop every duplicate
        if self.node == rreq.dst:
            route = (rreq.src,) + rreq.route_record + (self.node,)
            self.send_rrep(route, rreq.seq, PRIMARY)
            return
        if self.config.reply_from_cache:
            cached = self.cache.lookup(rreq.dst)
            if cached is not None:
                full = (rreq.src,) + rreq.route_record + cached
                if loop_free(full):
                    # answer from cache instead of propagating the flood
                    self._send_cache_rrep(full, rreq)
                    return
        if self.node in rreq.route_record:
            return
        self._broadcast_rreq(rreq.forwarded_by(self.node, None), jittered=True)

    def _send_cache_rrep(self, full_route: tuple[int, ...], rreq: Rreq) -> None:
        """Reply on behalf of the destination using a cached suffix."""
        prefix = (rreq.src,) + rreq.route_record + (self.node,)
        rrep = Rrep(src=rreq.src, dst=rreq.dst, seq=rreq.seq, route=full_route,
                    role=PRIMARY, reply_path=tuple(reversed(prefix)), cursor=0)
        self._unicast_rrep(rrep)

    def install_route(self, rrep: Rrep) -> None:
        self.cache.insert(rrep.route)

    def note_forwarded_rrep(self, rrep: Rrep) -> None:
        # learn the tail of the route being reported back
        idx = rrep.route.index(self.node)
        suffix = rrep.route[idx:]
        if len(suffix) >= 2:
            self.cache.insert(suffix)

    def after_data_break(self, pkt: DataPacket, broken_to: int) -> None:
        if pkt.salvage_count >= self.config.max_salvage_count:
            self.sim.trace.drop(self.sim.loop.now, self.node, DATA, "salvage-exhausted",
                                ident_data(pkt.flow, pkt.uid))
            return
        cached = self.cache.lookup(pkt.dst)
        if cached is None:
            self.sim.trace.drop(self.sim.loop.now, self.node, DATA, "link-break",
                                ident_data(pkt.flow, pkt.uid))
            return
        pkt.source_route = cached
        pkt.cursor = 0
        pkt.salvage_count += 1
        self._unicast_data(pkt)
