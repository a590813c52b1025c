"""Behavior shared by both routing protocols.

Source-routed forwarding, the send buffer with discovery rate limiting,
route-reply travel along the reversed discovered route, and route-error
propagation upstream are common; the protocols differ in how requests are
answered and forwarded, how routes are selected and stored, and whether
intermediate nodes may salvage failed data packets.
"""
from __future__ import annotations

from .airlink import BROADCAST, UNICAST, Frame
from .engine import SimulationError
from .packets import DATA, RERR, RREP, RREQ, DataPacket, Rerr, Rrep, Rreq
from .tables import RouteCache, RreqTable, SendBuffer
from .trace import ident_ctrl, ident_data


class RoutingAgent:
    cache_mode = "dsr"

    def __init__(self, sim, node: int):
        self.sim = sim
        self.node = node
        self.cache = RouteCache(self.cache_mode, max_routes=sim.max_routes_per_dst)
        self.rreq_table = RreqTable()
        self.buffer = SendBuffer(sim.send_buffer_timeout_ns)
        self.backoff: dict[int, tuple[int, int]] = {}  # dst -> (next_allowed_ns, gap_ns)
        self.seq_counter = 0

    # -- traffic entry point -------------------------------------------------

    def send_data(self, pkt: DataPacket) -> None:
        route = self.route_for_data(pkt.dst)
        if route is not None:
            pkt.source_route = route
            pkt.cursor = 0
            self._unicast_data(pkt)
        else:
            self.buffer.add(pkt, self.sim.loop.now)
            self.request_discovery(pkt.dst)

    def route_for_data(self, dst: int):
        return self.cache.lookup(dst)

    # -- discovery ------------------------------------------------------------

    def next_seq(self) -> int:
        self.seq_counter += 1
        return self.seq_counter

    def request_discovery(self, dst: int) -> bool:
        """Flood a route request unless rate limiting says an earlier one is pending."""
        now = self.sim.loop.now
        next_allowed, gap = self.backoff.get(dst, (0, self.sim.backoff_initial_ns))
        if now < next_allowed:
            return False
        self.backoff[dst] = (now + gap, min(gap * 2, self.sim.backoff_cap_ns))
        rreq = Rreq(src=self.node, dst=dst, seq=self.next_seq())
        self._broadcast_rreq(rreq, jittered=False)
        return True

    def _broadcast_rreq(self, rreq: Rreq, jittered: bool) -> None:
        size = self.sim.sizes.rreq(len(rreq.route_record), self.carries_energy)
        self.sim.trace.enq_rreq(self.sim.loop.now, self.node, rreq.src, rreq.seq,
                                rreq.route_record, rreq.min_bat_lev,
                                self.sim.ledger.residual_fj(self.node))
        ident = ident_ctrl(rreq.src, rreq.seq, rreq.route_record) + f" d={rreq.dst}"
        frame = Frame(RREQ, rreq, BROADCAST, None, size, ident)
        self.sim.radio.enqueue(self.node, frame, jittered=jittered)

    def _discovery_succeeded(self, dst: int) -> None:
        self.backoff.pop(dst, None)
        self._flush_buffer(dst)

    def _flush_buffer(self, dst: int) -> None:
        fresh, expired = self.buffer.drain(dst, self.sim.loop.now)
        for pkt in expired:
            self.sim.trace.drop(self.sim.loop.now, self.node, DATA, "buffer-expired",
                                ident_data(pkt.flow, pkt.uid))
        for pkt in fresh:
            self.send_data(pkt)

    # -- reception dispatch ----------------------------------------------------

    def on_receive(self, frame: Frame, from_node: int) -> None:
        kind = frame.kind
        if kind == RREQ:
            self.handle_rreq(frame.packet, from_node)
        elif kind == RREP:
            self._handle_rrep(frame.packet)
        elif kind == RERR:
            self.handle_rerr(frame.packet)
        else:
            self._handle_data(frame.packet)

    # -- route replies ----------------------------------------------------------

    def send_rrep(self, route: tuple[int, ...], seq: int, role: str) -> None:
        """Originate a reply that travels the reversed discovered route."""
        reply_path = tuple(reversed(route))
        rrep = Rrep(src=route[0], dst=route[-1], seq=seq, route=route, role=role,
                    reply_path=reply_path, cursor=0)
        self._unicast_rrep(rrep)

    def _unicast_rrep(self, rrep: Rrep) -> None:
        next_hop = rrep.reply_path[rrep.cursor + 1]
        size = self.sim.sizes.rrep(len(rrep.route))
        ident = ident_ctrl(rrep.src, rrep.seq) + f" role={rrep.role}"
        frame = Frame(RREP, rrep, UNICAST, next_hop, size, ident)
        self.sim.radio.enqueue(self.node, frame)

    def _handle_rrep(self, rrep: Rrep) -> None:
        rrep = rrep.advanced()
        if rrep.reply_path[rrep.cursor] != self.node:
            raise SimulationError(f"rrep cursor mismatch at node {self.node}")
        if self.node == rrep.src:
            self.install_route(rrep)
            self._discovery_succeeded(rrep.dst)
            return
        self.note_forwarded_rrep(rrep)
        self._unicast_rrep(rrep)

    def install_route(self, rrep: Rrep) -> None:
        raise NotImplementedError

    def note_forwarded_rrep(self, rrep: Rrep) -> None:
        """Hook for protocols that learn routes while relaying replies."""

    # -- route errors -------------------------------------------------------------

    def send_rerr_upstream(self, pkt: DataPacket, broken_to: int) -> None:
        """Report a broken link back toward the packet's source."""
        upstream = tuple(reversed(pkt.source_route[: pkt.cursor + 1]))
        rerr = Rerr(reporter=self.node, broken_from=self.node, broken_to=broken_to,
                    session_src=pkt.src, reply_path=upstream, cursor=0)
        if len(upstream) == 1:
            return  # the source itself detected the break; nothing to send
        self._unicast_rerr(rerr)

    def _unicast_rerr(self, rerr: Rerr) -> None:
        next_hop = rerr.reply_path[rerr.cursor + 1]
        ident = f"rp={rerr.reporter} bf={rerr.broken_from} bt={rerr.broken_to}"
        frame = Frame(RERR, rerr, UNICAST, next_hop, self.sim.sizes.rerr, ident)
        self.sim.radio.enqueue(self.node, frame)

    def handle_rerr(self, rerr: Rerr) -> None:
        rerr = rerr.advanced()
        if rerr.reply_path[rerr.cursor] != self.node:
            raise SimulationError(f"rerr cursor mismatch at node {self.node}")
        self.cache.invalidate_link(rerr.broken_from, rerr.broken_to)
        at_path_end = rerr.cursor == len(rerr.reply_path) - 1
        if not at_path_end and self.node != rerr.session_src:
            self._unicast_rerr(rerr)
            return
        # at the session source (or at the head of a salvaged route, where the
        # upstream path ends): rediscover for any traffic left without a route
        for dst in self.buffer.destinations():
            if self.cache.lookup(dst) is None:
                self.request_discovery(dst)

    # -- data path -----------------------------------------------------------------

    def _unicast_data(self, pkt: DataPacket) -> None:
        next_hop = pkt.source_route[pkt.cursor + 1]
        size = self.sim.sizes.data(len(pkt.source_route), pkt.payload_size)
        frame = Frame(DATA, pkt, UNICAST, next_hop, size, ident_data(pkt.flow, pkt.uid))
        self.sim.radio.enqueue(self.node, frame)

    def _handle_data(self, pkt_in: DataPacket) -> None:
        pkt = pkt_in.copy()
        pkt.cursor += 1
        if pkt.source_route[pkt.cursor] != self.node:
            raise SimulationError(f"data cursor mismatch at node {self.node}")
        if self.node == pkt.dst:
            self.sim.trace.deliver(self.sim.loop.now, self.node, pkt.flow, pkt.uid,
                                   pkt.payload_size)
            self.sim.counters.data_received += 1
            return
        self._unicast_data(pkt)

    # -- link failures ----------------------------------------------------------------

    def on_link_failure(self, frame: Frame) -> None:
        if frame.kind == DATA:
            self._data_link_failure(frame.packet, frame.next_hop)
        else:
            self.sim.trace.drop(self.sim.loop.now, self.node, frame.kind,
                                "link-failure", frame.ident)

    def _data_link_failure(self, pkt: DataPacket, broken_to: int) -> None:
        self.cache.invalidate_link(self.node, broken_to)
        if self.node == pkt.src:
            # first hop failed: try any other stored route, else buffer and rediscover
            route = self.route_for_data(pkt.dst)
            if route is not None:
                pkt.source_route = route
                pkt.cursor = 0
                self._unicast_data(pkt)
            else:
                self.buffer.add(pkt, self.sim.loop.now)
                self.request_discovery(pkt.dst)
            return
        self.send_rerr_upstream(pkt, broken_to)
        self.after_data_break(pkt, broken_to)

    def after_data_break(self, pkt: DataPacket, broken_to: int) -> None:
        """Protocol-specific fate of a data packet an intermediate failed to forward."""
        raise NotImplementedError

    # -- end of run -----------------------------------------------------------------

    def sweep_buffer(self, t: int) -> None:
        for pkt in self.buffer.sweep_all():
            self.sim.trace.drop(t, self.node, DATA, "run-end",
                                ident_data(pkt.flow, pkt.uid))

    # -- protocol hooks ----------------------------------------------------------------

    carries_energy = False

    def handle_rreq(self, rreq: Rreq, from_node: int) -> None:
        raise NotImplementedError
