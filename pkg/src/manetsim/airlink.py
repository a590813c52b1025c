"""Simplified half-duplex link layer over unit-disk connectivity.

Each node serves a FIFO interface queue one frame at a time, staying busy
for the frame's airtime. Propagation delay is zero. Broadcasts reach every
node in range at transmit start; unicasts reach the next hop iff it is in
range at transmit start. Under overlap interference, a reception that
overlaps any other transmission audible at the receiver (including the
receiver's own) is destroyed. There is no carrier sensing and no capture.

Failed unicasts are retransmitted back-to-back; after `mac_retries` total
attempts the routing layer gets a link-failure notification. Queue overflow
drops the newest frame (drop-tail).
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .engine import SEC, EventLoop, RandomStreams
from .energy import EnergyLedger
from .mobility import World
from .packets import DATA
from .trace import Trace, ident_data

JITTER_STREAM = "jitter"
LOSS_STREAM = "loss"
RETRY_STREAM = "mac-retry"

BROADCAST = "broadcast"
UNICAST = "unicast"

INTERFERENCE_NONE = "none"
INTERFERENCE_OVERLAP = "overlap"


@dataclass(frozen=True)
class LinkLayerConfig:
    bandwidth_bps: int = 2_000_000
    queue_capacity: int = 50
    mac_retries: int = 4
    broadcast_jitter_max_s: float = 0.010
    retry_backoff_max_s: float = 0.020
    interference_mode: str = INTERFERENCE_OVERLAP
    loss_probability: float = 0.0

    def __post_init__(self):
        if self.bandwidth_bps <= 0:
            raise ValueError("bandwidth must be positive")
        if self.queue_capacity < 1:
            raise ValueError("queue capacity must be at least 1")
        if not 0.0 <= self.loss_probability <= 1.0:
            raise ValueError("loss probability must lie in [0, 1]")
        if self.retry_backoff_max_s < 0:
            raise ValueError("retry backoff must be >= 0")
        if self.interference_mode not in (INTERFERENCE_NONE, INTERFERENCE_OVERLAP):
            raise ValueError(f"unknown interference mode {self.interference_mode!r}")


def airtime_ns(size_bytes: int, bandwidth_bps: int) -> int:
    if size_bytes <= 0:
        raise ValueError("frame size must be positive")
    return (size_bytes * 8 * SEC) // bandwidth_bps


def airtime_s(size_bytes: int, bandwidth_bps: int) -> float:
    if size_bytes <= 0:
        raise ValueError("frame size must be positive")
    return size_bytes * 8 / bandwidth_bps


@dataclass(slots=True)
class Frame:
    kind: str
    packet: object
    mode: str            # broadcast | unicast
    next_hop: int | None
    size: int
    ident: str           # preformatted trace identity tokens
    attempts: int = 0


@dataclass(slots=True)
class _TxRecord:
    sender: int
    start: int
    end: int
    heard: frozenset
    frame: Frame
    lost: bool  # transmit charge truncated at depletion


class Radio:
    """Owns the interface queues and delivers frames to the routing layer.

    Callbacks wired by the simulation:
      deliver(node, frame, from_node)   -- successful reception
      link_failure(node, frame)         -- unicast gave up after retries
    """

    def __init__(self, loop: EventLoop, world: World, ledger: EnergyLedger,
                 trace: Trace, rng: RandomStreams, config: LinkLayerConfig,
                 counters=None):
        self.loop = loop
        self.world = world
        self.ledger = ledger
        self.trace = trace
        self.rng = rng
        self.config = config
        self.counters = counters
        n = len(ledger)
        self.queues: list[deque] = [deque() for _ in range(n)]
        self.current: list[Frame | None] = [None] * n
        self._active: list[_TxRecord] = []
        self._max_airtime = 0
        self._jitter_max_ns = round(config.broadcast_jitter_max_s * SEC)
        self.deliver = lambda node, frame, from_node: None
        self.link_failure = lambda node, frame: None

    # -- queueing ----------------------------------------------------------

    def enqueue(self, sender: int, frame: Frame, jittered: bool = False) -> None:
        if jittered and self._jitter_max_ns > 0:
            delay = round(self.rng.uniform(JITTER_STREAM, 0.0, self._jitter_max_ns))
            if delay > 0:
                self.loop.schedule_in(delay, self._enqueue, (sender, frame), kind="jitter-enq")
                return
        self._enqueue(sender, frame)

    def _enqueue(self, sender: int, frame: Frame) -> None:
        t = self.loop.now
        if not self.ledger.alive(sender):
            if frame.kind == DATA:
                self.trace.drop(t, sender, frame.kind, "depleted", frame.ident)
            return
        queue = self.queues[sender]
        if len(queue) >= self.config.queue_capacity:
            self.trace.drop(t, sender, frame.kind, "queue-overflow", frame.ident)
            return
        queue.append(frame)
        if self.current[sender] is None:
            self._start_next(sender)

    def _start_next(self, sender: int) -> None:
        frame = self.queues[sender].popleft()
        self.current[sender] = frame
        self._transmit(sender, frame)

    # -- transmission ------------------------------------------------------

    def _transmit(self, sender: int, frame: Frame) -> None:
        t = self.loop.now
        duration = airtime_ns(frame.size, self.config.bandwidth_bps)
        if duration > self._max_airtime:
            self._max_airtime = duration
        fj, truncated = self.ledger.charge_tx(sender, duration)
        self.trace.charge(t, sender, "tx", fj)
        frame.attempts += 1
        to = frame.next_hop if frame.mode == UNICAST else None
        self.trace.tx(t, sender, frame.kind, to, frame.size, frame.attempts, frame.ident)
        if frame.kind != DATA and self.counters is not None:
            self.counters.control_tx += 1
        heard = frozenset(self.world.neighbors_in_range(sender, t))
        record = _TxRecord(sender, t, t + duration, heard, frame, truncated)
        self._active.append(record)
        self.loop.schedule(t + duration, self._tx_end, (sender, record), kind="tx-end")

    def _overlapping(self, record: _TxRecord) -> list:
        """Transmissions sharing airtime with this one (interference candidates)."""
        if self.config.interference_mode != INTERFERENCE_OVERLAP:
            return []
        return [other for other in self._active
                if other is not record
                and other.start < record.end and other.end > record.start]

    @staticmethod
    def _collided(receiver: int, overlapping: list) -> bool:
        for other in overlapping:
            if other.sender == receiver or receiver in other.heard:
                return True
        return False

    def _tx_end(self, sender: int, record: _TxRecord) -> None:
        t = self.loop.now
        frame = record.frame
        horizon = t - self._max_airtime
        self._active = [r for r in self._active if r.end > horizon]

        if record.lost:
            # battery died mid-transmission: nobody hears the frame
            if frame.kind == DATA:
                self.trace.drop(t, sender, frame.kind, "depleted", frame.ident)
        elif frame.mode == BROADCAST:
            overlapping = self._overlapping(record)
            for receiver in sorted(record.heard):
                self._receive(receiver, sender, record, overlapping)
        else:
            receiver = frame.next_hop
            overlapping = self._overlapping(record)
            ok = receiver in record.heard and self._receive(receiver, sender, record,
                                                            overlapping)
            if self.ledger.model.overhear_charging:
                self._charge_overhearers(record, receiver, overlapping)
            if not ok:
                if frame.attempts < self.config.mac_retries:
                    # retry after a short random backoff so consecutive
                    # attempts escape the burst that destroyed this one;
                    # the frame stays at the head of the queue meanwhile
                    self._retry(sender, frame)
                    return
                self.current[sender] = None
                self.link_failure(sender, frame)
                self._serve(sender)
                return

        self.current[sender] = None
        self._serve(sender)

    def _retry(self, sender: int, frame: Frame) -> None:
        cap = self.config.retry_backoff_max_s
        delay = round(self.rng.uniform(RETRY_STREAM, 0.0, cap * SEC)) if cap > 0 else 0
        if delay > 0:
            self.loop.schedule_in(delay, self._transmit, (sender, frame), kind="mac-retry")
        else:
            self._transmit(sender, frame)

    def _serve(self, sender: int) -> None:
        if self.current[sender] is None and self.queues[sender] and self.ledger.alive(sender):
            self._start_next(sender)

    def _charge_overhearers(self, record: _TxRecord, intended: int,
                            overlapping: list) -> None:
        """Bill reception energy to bystanders of a unicast (optional model)."""
        t = self.loop.now
        for node in sorted(record.heard):
            if node == intended or not self.ledger.alive(node):
                continue
            if overlapping and self._collided(node, overlapping):
                continue
            fj, _ = self.ledger.charge_rx(node, record.end - record.start)
            self.trace.charge(t, node, "rx", fj)

    def _receive(self, receiver: int, sender: int, record: _TxRecord,
                 overlapping: list) -> bool:
        """Attempt the reception at `receiver`; returns True on delivery."""
        t = self.loop.now
        frame = record.frame
        if not self.ledger.alive(receiver):
            return False
        is_data = frame.kind == DATA
        if overlapping and self._collided(receiver, overlapping):
            # frame-level loss; logged for data frames, whose journeys the
            # trace accounts packet by packet (control floods would swamp it)
            if is_data:
                self.trace.drop(t, receiver, frame.kind, "collision", frame.ident)
            return False
        p = self.config.loss_probability
        if p > 0.0 and self.rng.stream(LOSS_STREAM).random() < p:
            if is_data:
                self.trace.drop(t, receiver, frame.kind, "loss", frame.ident)
            return False
        fj, truncated = self.ledger.charge_rx(receiver, record.end - record.start)
        self.trace.charge(t, receiver, "rx", fj)
        if truncated:
            if is_data:
                self.trace.drop(t, receiver, frame.kind, "rx-depleted", frame.ident)
            return False
        self.trace.rx(t, receiver, frame.kind, sender, frame.size, frame.ident)
        self.deliver(receiver, frame, sender)
        return True

    # -- end of run --------------------------------------------------------

    def sweep_unfinished(self, t: int) -> None:
        """Emit terminal drops for data frames still queued or in flight."""
        for node in range(len(self.queues)):
            frame = self.current[node]
            if frame is not None and frame.kind == DATA:
                self.trace.drop(t, node, DATA, "run-end", frame.ident)
            for frame in self.queues[node]:
                if frame.kind == DATA:
                    self.trace.drop(t, node, DATA, "run-end", frame.ident)


def data_ident(pkt) -> str:
    return ident_data(pkt.flow, pkt.uid)
