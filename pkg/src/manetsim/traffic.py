"""Constant-bit-rate datagram sessions over UDP-like semantics.

Each session emits a fixed-size packet at its start instant and then at
fixed intervals, with no retransmission, until the end of the run. Source
and destination are drawn uniformly (distinct within a pair; pairs may
repeat across sessions).
"""
from __future__ import annotations

from dataclasses import dataclass

from .engine import SEC, RandomStreams

TRAFFIC_STREAM = "traffic"


@dataclass(frozen=True)
class Session:
    flow: int
    src: int
    dst: int
    rate: float        # packets per second
    payload: int       # bytes
    start_ns: int

    def emission_time(self, k: int) -> int:
        """Time of the k-th packet (k=0 fires at the start instant)."""
        return self.start_ns + round(k * SEC / self.rate)

    def emission_count(self, run_ns: int) -> int:
        """Closed-form number of packets emitted strictly before run end."""
        if self.start_ns >= run_ns:
            return 0
        # count k with start + k/rate < run  (in exact ns arithmetic)
        n = int((run_ns - self.start_ns) * self.rate / SEC) + 1
        while self.emission_time(n) < run_ns:
            n += 1
        while n > 0 and self.emission_time(n - 1) >= run_ns:
            n -= 1
        return n


def generate_sessions(count: int, node_count: int, rate: float, payload: int,
                      start_window_s: float, rng: RandomStreams) -> list[Session]:
    if count < 1:
        raise ValueError("need at least one session")
    if node_count < 2:
        raise ValueError("need at least two nodes to form a session")
    if rate <= 0:
        raise ValueError("rate must be positive")
    stream = rng.stream(TRAFFIC_STREAM)
    sessions = []
    for flow in range(count):
        src = stream.randrange(node_count)
        dst = stream.randrange(node_count - 1)
        if dst >= src:
            dst += 1  # uniform over nodes other than src
        start_s = rng.uniform(TRAFFIC_STREAM, 0.0, start_window_s)
        sessions.append(Session(flow, src, dst, rate, payload, round(start_s * SEC)))
    return sessions
