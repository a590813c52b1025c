"""Per-node routing state: route cache, request table, candidate table, send buffer."""
from __future__ import annotations

from dataclasses import dataclass

from .packets import ALTERNATE, PRIMARY, DataPacket, loop_free

FIRST = "first"
DUPLICATE = "duplicate"
EXHAUSTED = "seen-and-exhausted"


@dataclass(slots=True)
class RreqTableEntry:
    src: int
    seq: int
    nb_hops: int        # hop count of the first-received copy
    last_node: int      # neighbor that transmitted the first copy
    duplicates_forwarded: int = 0


class RreqTable:
    """Duplicate-suppression state, one entry per (src, seq)."""

    def __init__(self) -> None:
        self._entries: dict[tuple[int, int], RreqTableEntry] = {}

    def record(self, src: int, seq: int, from_node: int, hop_count: int) -> tuple[str, RreqTableEntry]:
        key = (src, seq)
        entry = self._entries.get(key)
        if entry is None:
            entry = RreqTableEntry(src, seq, hop_count, from_node)
            self._entries[key] = entry
            return FIRST, entry
        if entry.duplicates_forwarded >= 1:
            return EXHAUSTED, entry
        return DUPLICATE, entry

    def get(self, src: int, seq: int) -> RreqTableEntry | None:
        return self._entries.get((src, seq))


class LoopedRouteError(ValueError):
    pass


class RouteCache:
    """Per-destination store of full source routes.

    DSR mode keeps up to `max_routes` per destination, evicting the oldest;
    lookups prefer the shortest stored route (insertion order breaks ties).
    MEA-DSR mode keeps exactly one primary and one alternate slot per
    destination, and lookups prefer the primary.
    """

    def __init__(self, mode: str, max_routes: int = 3) -> None:
        assert mode in ("dsr", "mea")
        self.mode = mode
        self.max_routes = max_routes
        # dsr: dst -> list of routes (insertion order)
        # mea: dst -> {role: (seq, route)}
        self._routes: dict[int, list] = {}
        self._slots: dict[int, dict[str, tuple[int, tuple[int, ...]]]] = {}

    def insert(self, route: tuple[int, ...], role: str = PRIMARY, seq: int = 0) -> None:
        if not loop_free(route) or len(route) < 2:
            raise LoopedRouteError(f"rejecting looped or degenerate route {route}")
        dst = route[-1]
        if self.mode == "dsr":
            routes = self._routes.setdefault(dst, [])
            if route in routes:
                return
            routes.append(route)
            if len(routes) > self.max_routes:
                routes.pop(0)
        else:
            slots = self._slots.setdefault(dst, {})
            held = slots.get(role)
            if held is None or seq >= held[0]:
                slots[role] = (seq, route)

    def lookup(self, dst: int) -> tuple[int, ...] | None:
        if self.mode == "dsr":
            routes = self._routes.get(dst)
            if not routes:
                return None
            return min(routes, key=len)
        slots = self._slots.get(dst)
        if not slots:
            return None
        for role in (PRIMARY, ALTERNATE):
            held = slots.get(role)
            if held is not None:
                return held[1]
        return None

    def routes_for(self, dst: int) -> list[tuple[int, ...]]:
        if self.mode == "dsr":
            return list(self._routes.get(dst, ()))
        slots = self._slots.get(dst, {})
        return [slots[r][1] for r in (PRIMARY, ALTERNATE) if r in slots]

    def invalidate_link(self, a: int, b: int) -> int:
        """Remove every route using the directed link a->b; returns removal count."""
        removed = 0
        if self.mode == "dsr":
            for dst, routes in self._routes.items():
                kept = [r for r in routes if not _uses_link(r, a, b)]
                removed += len(routes) - len(kept)
                self._routes[dst] = kept
        else:
            for dst, slots in self._slots.items():
                for role in list(slots):
                    if _uses_link(slots[role][1], a, b):
                        del slots[role]
                        removed += 1
        return removed


def _uses_link(route: tuple[int, ...], a: int, b: int) -> bool:
    for i in range(len(route) - 1):
        if route[i] == a and route[i + 1] == b:
            return True
    return False


@dataclass(frozen=True, slots=True)
class RouteCandidate:
    """One row of a destination's candidate table during route selection."""

    src: int
    seq: int
    route: tuple[int, ...]        # full node sequence src..dst
    min_bat_lev: float            # joules; +inf for a direct route with no intermediates
    arrival_time: int             # ns
    mbl_fj: int | None = None     # exact femtojoule value, kept for the trace


class CandidateTable:
    """Destination-side store of candidate routes, keyed by (src, seq).

    A key is closed once selection has run; late arrivals for a closed key
    are dropped rather than folded into a new selection round.
    """

    def __init__(self) -> None:
        self._rows: dict[tuple[int, int], list[RouteCandidate]] = {}
        self._closed: set[tuple[int, int]] = set()

    def closed(self, src: int, seq: int) -> bool:
        return (src, seq) in self._closed

    def add(self, cand: RouteCandidate) -> bool:
        """Insert a row; returns True when this is the first row for its key."""
        key = (cand.src, cand.seq)
        rows = self._rows.get(key)
        if rows is None:
            self._rows[key] = [cand]
            return True
        rows.append(cand)
        return False

    def take(self, src: int, seq: int) -> list[RouteCandidate]:
        """Remove and return all rows for the key, closing it."""
        self._closed.add((src, seq))
        return self._rows.pop((src, seq), [])


@dataclass(slots=True)
class BufferedPacket:
    packet: DataPacket
    enqueued_at: int  # ns


class SendBuffer:
    """Per-destination packets waiting for a route; stale entries expire."""

    def __init__(self, timeout_ns: int) -> None:
        self.timeout_ns = timeout_ns
        self._queues: dict[int, list[BufferedPacket]] = {}

    def add(self, pkt: DataPacket, now: int) -> None:
        self._queues.setdefault(pkt.dst, []).append(BufferedPacket(pkt, now))

    def pending(self, dst: int) -> bool:
        return bool(self._queues.get(dst))

    def destinations(self) -> list[int]:
        return [d for d, q in self._queues.items() if q]

    def drain(self, dst: int, now: int) -> tuple[list[DataPacket], list[DataPacket]]:
        """Remove all packets for dst; returns (fresh, expired)."""
        fresh: list[DataPacket] = []
        expired: list[DataPacket] = []
        for item in self._queues.pop(dst, []):
            if now - item.enqueued_at > self.timeout_ns:
                expired.append(item.packet)
            else:
                fresh.append(item.packet)
        return fresh, expired

    def sweep_all(self) -> list[DataPacket]:
        """Remove and return everything still buffered (end-of-run accounting)."""
        out = []
        for dst in sorted(self._queues):
            out.extend(item.packet for item in self._queues[dst])
        self._queues.clear()
        return out
