"""MEA-DSR node behavior.

Requests accumulate the minimum residual battery level seen along their
path. Only destinations answer; intermediate nodes forward the first copy
plus at most one qualifying duplicate (different incoming neighbor, hop
count no larger than the first copy's). The destination collects candidate
routes for a short window, then picks the route maximizing bottleneck
energy per hop as primary and the maximally node-disjoint runner-up as
alternate. Sources stick to one route per session until it breaks, and
intermediate nodes never salvage data packets.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .energy import to_j
from .packets import ALTERNATE, DATA, PRIMARY, DataPacket, Rrep, Rreq
from .routing import RoutingAgent
from .tables import DUPLICATE, FIRST, CandidateTable, RouteCandidate
from .trace import ident_data


@dataclass(frozen=True)
class MeaDsrConfig:
    wait_time_s: float = 0.050    # destination-side collection window
    alternate_rrep: bool = True   # also report the alternate back to the source

    def __post_init__(self):
        if self.wait_time_s <= 0:
            raise ValueError("wait_time must be positive")


# -- route selection ----------------------------------------------------------

def energy_per_hop(cand: RouteCandidate):
    """Bottleneck residual energy divided by route length, as an exact key.

    Routes with no intermediate nodes carry an infinite bottleneck (no relay
    battery constrains them) and outrank every finite candidate.
    """
    if math.isinf(cand.min_bat_lev):
        return (1, Fraction(0))
    length = len(cand.route) - 1
    if length < 1:
        raise ValueError(f"degenerate route {cand.route}")
    return (0, Fraction(cand.min_bat_lev) / length)


def select_primary(candidates: list[RouteCandidate]) -> RouteCandidate:
    """Candidate with the highest bottleneck-energy-per-hop ratio.

    Ties fall to the earliest arrival, then to the lexicographically
    smallest route, so selection is a pure function of the table.
    """
    if not candidates:
        raise ValueError("select_primary needs at least one candidate")
    best = candidates[0]
    best_key = energy_per_hop(best)
    for cand in candidates[1:]:
        key = energy_per_hop(cand)
        if key > best_key:
            best, best_key = cand, key
        elif key == best_key:
            if (cand.arrival_time, cand.route) < (best.arrival_time, best.route):
                best = cand
    return best


def disjunction_ratio(candidate: RouteCandidate, primary: RouteCandidate) -> float:
    """Fraction of the candidate's intermediate nodes not shared with the primary."""
    frac = _disjunction(candidate, primary)
    return frac.numerator / frac.denominator


def _disjunction(candidate: RouteCandidate, primary: RouteCandidate) -> Fraction:
    if (candidate.route[0], candidate.route[-1]) != (primary.route[0], primary.route[-1]):
        raise ValueError("routes must share both endpoints")
    inner = set(candidate.route[1:-1])
    overlap = len(inner & set(primary.route[1:-1]))
    denom = max(1, len(inner))
    return Fraction(denom - overlap, denom)


def select_alternate(candidates: list[RouteCandidate],
                     primary: RouteCandidate) -> RouteCandidate | None:
    """Most node-disjoint candidate besides the primary.

    Equal disjunction falls back to the bottleneck-energy-per-hop ratio,
    then earliest arrival, then smallest route.
    """
    best = None
    best_key = None
    for cand in candidates:
        if cand is primary:
            continue
        key = (_disjunction(cand, primary), energy_per_hop(cand))
        if best is None or key > best_key:
            best, best_key = cand, key
        elif key == best_key:
            if (cand.arrival_time, cand.route) < (best.arrival_time, best.route):
                best = cand
    return best


# -- node behavior ---------------------------------------------------------------

class MeaDsrAgent(RoutingAgent):
    cache_mode = "mea"
    carries_energy = True

    def __init__(self, sim, node: int):
        super().__init__(sim, node)
        self.config: MeaDsrConfig = sim.mea_config
        self.candidates = CandidateTable()
        self._wait_ns = round(self.config.wait_time_s * 1e9)

    def handle_rreq(self, rreq: Rreq, from_node: int) -> None:
        if rreq.src == self.node:
            return
        if self.node == rreq.dst:
            self._collect_candidate(rreq)
            return
        status, entry = self.rreq_table.record(
            rreq.src, rreq.seq, from_node, len(rreq.route_record) + 1)
        if status == FIRST:
            self._forward(rreq)
            return
        if status != DUPLICATE:
            return  # duplicate budget already spent
        hop_count = len(rreq.route_record) + 1
        if (from_node != entry.last_node and hop_count <= entry.nb_hops
                and self.node not in rreq.route_record):
            entry.duplicates_forwarded = 1
            self._forward(rreq)

    def _forward(self, rreq: Rreq) -> None:
        if self.node in rreq.route_record:
            return
        fwd = rreq.forwarded_by(self.node, self.sim.ledger.residual_fj(self.node))
        self._broadcast_rreq(fwd, jittered=True)

    def _collect_candidate(self, rreq: Rreq) -> None:
        if self.candidates.closed(rreq.src, rreq.seq):
            return  # selection already ran; late copies are discarded
        route = (rreq.src,) + rreq.route_record + (self.node,)
        mbl_fj = rreq.min_bat_lev
        mbl = math.inf if mbl_fj is None else to_j(mbl_fj)
        cand = RouteCandidate(rreq.src, rreq.seq, route, mbl,
                              self.sim.loop.now, mbl_fj)
        if self.candidates.add(cand):
            self.sim.loop.schedule_in(self._wait_ns, self.on_wait_expiry,
                                      (rreq.src, rreq.seq), kind="wait-expiry")

    def on_wait_expiry(self, src: int, seq: int) -> None:
        rows = self.candidates.take(src, seq)
        if not rows:
            return
        now = self.sim.loop.now
        for cand in rows:
            self.sim.trace.audit_candidate(now, self.node, cand)
        primary = select_primary(rows)
        alternate = select_alternate(rows, primary)
        self.sim.trace.selection(now, self.node, src, seq, primary, alternate)
        self.send_rrep(primary.route, seq, PRIMARY)
        if alternate is not None and self.config.alternate_rrep:
            self.send_rrep(alternate.route, seq, ALTERNATE)

    def install_route(self, rrep: Rrep) -> None:
        self.cache.insert(rrep.route, role=rrep.role, seq=rrep.seq)

    def after_data_break(self, pkt: DataPacket, broken_to: int) -> None:
        # no salvaging: intermediates report the break and give the packet up
        self.sim.trace.drop(self.sim.loop.now, self.node, DATA, "link-break-no-salvage",
                            ident_data(pkt.flow, pkt.uid))
