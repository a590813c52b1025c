"""Discrete-event core: integer-nanosecond clock, ordered event queue, seeded streams."""
from __future__ import annotations

import hashlib
import heapq
import math
import random
from dataclasses import dataclass

SEC = 1_000_000_000  # nanoseconds per second


def to_ns(seconds: float) -> int:
    return round(seconds * SEC)


def to_s(ns: int) -> float:
    return ns / SEC


class SimulationError(RuntimeError):
    """A logic bug inside a run (bad schedule, forwarding mismatch); aborts the run."""


@dataclass(slots=True)
class EventHandle:
    """Returned by schedule(); cancel() prevents dispatch."""

    fire_time: int
    sequence: int
    kind: str
    cancelled: bool = False

    def cancel(self) -> None:
        self.cancelled = True


@dataclass(slots=True)
class RunSummary:
    dispatched: int = 0
    cancelled: int = 0
    end_time: int = 0


class EventLoop:
    """Single-threaded scheduler.

    Events fire in (fire_time, sequence) order; sequence is a per-run
    monotonic counter, so insertion order breaks time ties and the whole
    dispatch order is exact and replayable.
    """

    def __init__(self) -> None:
        self.now = 0  # ns
        self._heap: list[tuple[int, int, EventHandle, object, tuple]] = []
        self._seq = 0

    def schedule(self, fire_time: int, callback, args: tuple = (), kind: str = "timer") -> EventHandle:
        if fire_time < self.now:
            raise SimulationError(
                f"schedule into the past: fire_time={fire_time} < now={self.now}"
            )
        handle = EventHandle(fire_time, self._seq, kind)
        heapq.heappush(self._heap, (fire_time, self._seq, handle, callback, args))
        self._seq += 1
        return handle

    def schedule_in(self, delay_ns: int, callback, args: tuple = (), kind: str = "timer") -> EventHandle:
        return self.schedule(self.now + delay_ns, callback, args, kind)

    def run_until(self, end_time: int) -> RunSummary:
        if end_time <= 0:
            raise SimulationError(f"run_until requires end_time > 0, got {end_time}")
        summary = RunSummary()
        heap = self._heap
        while heap and heap[0][0] <= end_time:
            t, _seq, handle, callback, args = heapq.heappop(heap)
            if handle.cancelled:
                summary.cancelled += 1
                continue
            self.now = t
            callback(*args)
            summary.dispatched += 1
        self.now = end_time
        summary.end_time = end_time
        return summary


def _derive_seed(master_seed: int, label: str) -> int:
    digest = hashlib.sha256(f"{master_seed}:{label}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


class RandomStreams:
    """Named substreams derived from one master seed.

    Each label gets its own Mersenne Twister seeded from a stable hash of
    (master_seed, label), so adding a consumer or reordering draws on one
    stream never shifts any other stream.
    """

    def __init__(self, master_seed: int) -> None:
        self.master_seed = master_seed
        self._streams: dict[str, random.Random] = {}

    def stream(self, label: str) -> random.Random:
        rng = self._streams.get(label)
        if rng is None:
            rng = random.Random(_derive_seed(self.master_seed, label))
            self._streams[label] = rng
        return rng

    def uniform(self, label: str, lo: float, hi: float) -> float:
        """Draw from [lo, hi); lo == hi returns lo."""
        if lo > hi:
            raise ValueError(f"uniform requires lo <= hi, got [{lo}, {hi}]")
        if lo == hi:
            return lo
        v = lo + (hi - lo) * self.stream(label).random()
        if v >= hi:  # guard against rounding up to the open bound
            v = math.nextafter(hi, lo)
        return v
