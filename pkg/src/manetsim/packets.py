"""Wire-level control and data packets shared by DSR and MEA-DSR.

Routes are tuples of node ids. A route record never contains the request's
source or destination; full routes run source..destination inclusive.
Nominal byte sizes drive airtime and overhead accounting and are
config-overridable; the constants are conventional header weights, not
measured values.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

RREQ = "rreq"
RREP = "rrep"
RERR = "rerr"
DATA = "data"

PRIMARY = "primary"
ALTERNATE = "alternate"


@dataclass(frozen=True)
class PacketSizes:
    rreq_base: int = 16
    rrep_base: int = 16
    rerr: int = 20
    data_base: int = 24
    per_hop: int = 4          # per node id carried in a route / record
    min_energy_field: int = 8  # extra RREQ field in MEA-DSR mode

    def rreq(self, record_len: int, carries_energy: bool) -> int:
        size = self.rreq_base + self.per_hop * record_len
        if carries_energy:
            size += self.min_energy_field
        return size

    def rrep(self, route_len: int) -> int:
        return self.rrep_base + self.per_hop * route_len

    def data(self, route_len: int, payload: int) -> int:
        return self.data_base + self.per_hop * route_len + payload


@dataclass(frozen=True, slots=True)
class Rreq:
    src: int
    dst: int
    seq: int
    route_record: tuple[int, ...] = ()
    min_bat_lev: int | None = None  # running minimum residual, femtojoules; None until first hop

    def forwarded_by(self, node: int, residual_fj: int | None) -> "Rreq":
        """Copy with this node appended; folds in its energy unless residual is None."""
        if residual_fj is None:
            mbl = self.min_bat_lev
        elif self.min_bat_lev is None:
            mbl = residual_fj  # first-hop neighbor writes its residual outright
        else:
            mbl = min(self.min_bat_lev, residual_fj)
        return replace(self, route_record=self.route_record + (node,), min_bat_lev=mbl)


@dataclass(frozen=True, slots=True)
class Rrep:
    src: int                 # requester the reply travels back to
    dst: int                 # destination that the route reaches
    seq: int
    route: tuple[int, ...]   # full node sequence src..dst
    role: str = PRIMARY      # primary or alternate (MEA-DSR)
    reply_path: tuple[int, ...] = ()  # hop sequence the reply itself travels
    cursor: int = 0

    def advanced(self) -> "Rrep":
        return replace(self, cursor=self.cursor + 1)


@dataclass(frozen=True, slots=True)
class Rerr:
    reporter: int
    broken_from: int
    broken_to: int
    session_src: int
    reply_path: tuple[int, ...] = ()  # reporter..session_src, upstream
    cursor: int = 0

    def advanced(self) -> "Rerr":
        return replace(self, cursor=self.cursor + 1)


@dataclass(slots=True)
class DataPacket:
    uid: int
    flow: int
    src: int
    dst: int
    source_route: tuple[int, ...]
    cursor: int
    payload_size: int
    generated_at: int  # ns
    salvage_count: int = 0

    def copy(self) -> "DataPacket":
        return DataPacket(self.uid, self.flow, self.src, self.dst, self.source_route,
                          self.cursor, self.payload_size, self.generated_at,
                          self.salvage_count)


def loop_free(route: tuple[int, ...]) -> bool:
    return len(set(route)) == len(route)
