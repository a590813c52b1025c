"""Random-waypoint mobility over a rectangular arena.

Each node starts paused at a uniform random position (time zero counts as a
waypoint arrival), pauses for the configured pause time, then repeatedly
draws a uniform waypoint and a uniform leg speed, moving in a straight line.
A pause time covering the whole run therefore yields a static network.
Initial placement is uniform, not steady-state corrected, so early-run
statistics differ slightly from the stationary regime.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .engine import SEC, RandomStreams

MOBILITY_STREAM = "mobility"


@dataclass(frozen=True)
class Arena:
    width: float
    height: float
    tx_range: float

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0 or self.tx_range <= 0:
            raise ValueError("arena dimensions and tx range must be positive")


class NodeMobility:
    """Piecewise state of one node: either paused or on a straight leg.

    Positions are floats (meters); segment boundaries are integer ns so the
    event schedule is exact. On a leg, position interpolates linearly and is
    pinned to the waypoint at the leg's end.
    """

    __slots__ = (
        "arena", "pause_ns", "speed_lo", "speed_hi",
        "x0", "y0", "x1", "y1", "t0", "t1", "moving",
    )

    def __init__(self, arena: Arena, pause_s: float, speed_interval: tuple[float, float],
                 position: tuple[float, float]):
        self.arena = arena
        self.pause_ns = round(pause_s * SEC)
        self.speed_lo, self.speed_hi = speed_interval
        if not (0 < self.speed_lo <= self.speed_hi):
            raise ValueError("speed interval must be positive and ordered")
        x, y = position
        self.x0 = self.x1 = x
        self.y0 = self.y1 = y
        self.t0 = 0
        self.t1 = self.pause_ns  # initial state: paused at the start position
        self.moving = False

    def next_change(self) -> int:
        """Time (ns) of the next waypoint arrival or pause end."""
        return self.t1

    def step(self, now: int, rng: RandomStreams) -> int:
        """Advance past the state change at `now`; returns the next change time.

        Arriving at a waypoint starts a pause (skipped when the pause time is
        zero); a pause ending draws a fresh waypoint and leg speed.
        """
        if self.moving:
            # arrived: sit at the waypoint for the pause duration
            self.x0 = self.x1
            self.y0 = self.y1
            self.t0 = now
            self.moving = False
            if self.pause_ns > 0:
                self.t1 = now + self.pause_ns
                return self.t1
            # zero pause: fall through straight into the next leg
        return self._start_leg(now, rng)

    def _start_leg(self, now: int, rng: RandomStreams) -> int:
        wx = rng.uniform(MOBILITY_STREAM, 0.0, self.arena.width)
        wy = rng.uniform(MOBILITY_STREAM, 0.0, self.arena.height)
        speed = rng.uniform(MOBILITY_STREAM, self.speed_lo, self.speed_hi)
        dist = math.hypot(wx - self.x0, wy - self.y0)
        self.x1 = wx
        self.y1 = wy
        self.t0 = now
        self.t1 = now + max(1, round(dist / speed * SEC))
        self.moving = True
        return self.t1

    def position_at(self, t: int) -> tuple[float, float]:
        if not self.moving or t <= self.t0:
            return self.x0, self.y0
        if t >= self.t1:
            return self.x1, self.y1
        u = (t - self.t0) / (self.t1 - self.t0)
        return self.x0 + (self.x1 - self.x0) * u, self.y0 + (self.y1 - self.y0) * u


class World:
    """Node placement plus unit-disk connectivity.

    The range threshold is closed: distance exactly equal to the
    transmission range still connects. Dead nodes (per the ledger) are
    excluded from every neighbor set.
    """

    def __init__(self, arena: Arena, mobilities: list[NodeMobility], ledger):
        self.arena = arena
        self.mobilities = mobilities
        self.ledger = ledger
        self._rsq = arena.tx_range * arena.tx_range
        n = len(mobilities)
        # segment state mirrored into arrays for the vectorized audience scan
        self._x0 = np.empty(n)
        self._y0 = np.empty(n)
        self._x1 = np.empty(n)
        self._y1 = np.empty(n)
        self._t0 = np.empty(n)
        self._t1 = np.empty(n)
        for node in range(n):
            self.refresh(node)
        self._snap_t = -1
        self._snap_x = self._x0.copy()
        self._snap_y = self._y0.copy()
        self._alive = np.ones(n, dtype=bool)
        self._alive_sync = 0

    def refresh(self, node: int) -> None:
        """Mirror a node's current segment after a mobility step."""
        m = self.mobilities[node]
        self._x0[node] = m.x0
        self._y0[node] = m.y0
        self._x1[node] = m.x1
        self._y1[node] = m.y1
        self._t0[node] = m.t0
        self._t1[node] = max(m.t1, m.t0 + 1)  # avoid a zero-length segment

    @classmethod
    def build(cls, arena: Arena, node_count: int, pause_s: float,
              speed_interval: tuple[float, float], rng: RandomStreams, ledger,
              positions: list[tuple[float, float]] | None = None) -> "World":
        if positions is None:
            positions = [
                (rng.uniform(MOBILITY_STREAM, 0.0, arena.width),
                 rng.uniform(MOBILITY_STREAM, 0.0, arena.height))
                for _ in range(node_count)
            ]
        mob = [NodeMobility(arena, pause_s, speed_interval, positions[i])
               for i in range(node_count)]
        return cls(arena, mob, ledger)

    def position_at(self, node: int, t: int) -> tuple[float, float]:
        return self.mobilities[node].position_at(t)

    def in_range(self, a: int, b: int, t: int) -> bool:
        ax, ay = self.mobilities[a].position_at(t)
        bx, by = self.mobilities[b].position_at(t)
        r = self.arena.tx_range
        return (ax - bx) ** 2 + (ay - by) ** 2 <= r * r

    def _positions(self, t: int):
        """All positions at time t, cached per timestamp.

        Positions are continuous across waypoint events, so a snapshot taken
        at time t stays valid even if a node's segment is replaced at t.
        A paused node has x1 == x0, so the interpolation is exact for it,
        and finished legs are pinned to the waypoint exactly.
        """
        if t != self._snap_t:
            u = (t - self._t0) / (self._t1 - self._t0)
            np.clip(u, 0.0, 1.0, out=u)
            xs = self._x0 + (self._x1 - self._x0) * u
            ys = self._y0 + (self._y1 - self._y0) * u
            done = u >= 1.0
            if done.any():
                xs[done] = self._x1[done]
                ys[done] = self._y1[done]
            self._snap_x = xs
            self._snap_y = ys
            self._snap_t = t
        return self._snap_x, self._snap_y

    def neighbors_in_range(self, node: int, t: int) -> list[int]:
        """Alive nodes within range of `node` at time t, ascending by id."""
        xs, ys = self._positions(t)
        dx = xs - xs[node]
        dy = ys - ys[node]
        mask = dx * dx + dy * dy <= self._rsq
        if self.ledger.dead_count:
            if self._alive_sync != self.ledger.dead_count:
                self._alive = np.array(self.ledger.alive_flags)
                self._alive_sync = self.ledger.dead_count
            mask &= self._alive
        mask[node] = False
        return np.nonzero(mask)[0].tolist()
