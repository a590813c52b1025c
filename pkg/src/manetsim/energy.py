"""Per-node battery accounting: transmit/receive charges, idle costs nothing.

All bookkeeping is integer femtojoules (power in integer microwatts times
airtime in integer nanoseconds), so energy conservation between the ledger
and the trace is exact, with zero float tolerance.
"""
from __future__ import annotations

from dataclasses import dataclass

FJ_PER_J = 10**15


def to_fj(joules: float) -> int:
    return round(joules * FJ_PER_J)


def to_j(fj: int) -> float:
    return fj / FJ_PER_J


@dataclass(frozen=True)
class EnergyModel:
    tx_power_w: float = 1.4
    rx_power_w: float = 1.0
    overhear_charging: bool = False

    def __post_init__(self):
        if self.tx_power_w <= 0 or self.rx_power_w <= 0:
            raise ValueError("tx/rx power must be positive")

    @property
    def tx_uw(self) -> int:
        return round(self.tx_power_w * 1e6)

    @property
    def rx_uw(self) -> int:
        return round(self.rx_power_w * 1e6)


def charge_fj(power_uw: int, airtime_ns: int) -> int:
    # uW * ns = 1e-6 W * 1e-9 s = 1e-15 J
    return power_uw * airtime_ns


class EnergyLedger:
    """Residual/consumed energy for every node in a run.

    A node whose residual hits zero is dead: it no longer transmits,
    receives, or appears in neighbor sets. A transmission that would
    overdraw the battery is truncated at depletion and the frame is lost.
    """

    def __init__(self, node_count: int, initial_j: float, model: EnergyModel) -> None:
        if initial_j <= 0:
            raise ValueError("initial energy must be positive")
        self.model = model
        self.initial_fj = [to_fj(initial_j)] * node_count
        self.consumed_fj = [0] * node_count
        self.alive_flags = [True] * node_count  # kept in sync by every charge
        self.dead_count = 0

    def __len__(self) -> int:
        return len(self.initial_fj)

    def residual_fj(self, node: int) -> int:
        return self.initial_fj[node] - self.consumed_fj[node]

    def alive(self, node: int) -> bool:
        return self.alive_flags[node]

    def residual_ratio(self, node: int) -> float:
        return self.residual_fj(node) / self.initial_fj[node]

    def _mark_dead(self, node: int) -> None:
        if self.alive_flags[node]:
            self.alive_flags[node] = False
            self.dead_count += 1

    def _charge(self, node: int, want: int) -> tuple[int, bool]:
        residual = self.initial_fj[node] - self.consumed_fj[node]
        if want > residual:  # overdraw: cap at depletion, frame is lost
            self.consumed_fj[node] += residual
            self._mark_dead(node)
            return residual, True
        self.consumed_fj[node] += want
        if want == residual:
            self._mark_dead(node)
        return want, False

    def charge_tx(self, node: int, airtime_ns: int) -> tuple[int, bool]:
        """Charge a transmission; returns (fj charged, truncated)."""
        return self._charge(node, charge_fj(self.model.tx_uw, airtime_ns))

    def charge_rx(self, node: int, airtime_ns: int) -> tuple[int, bool]:
        """Charge a reception; returns (fj charged, truncated)."""
        return self._charge(node, charge_fj(self.model.rx_uw, airtime_ns))

    def drain(self, node: int) -> int:
        """Consume all remaining energy (fault injection); returns fj drained."""
        residual = self.residual_fj(node)
        self.consumed_fj[node] += residual
        self._mark_dead(node)
        return residual

    def total_consumed_fj(self) -> int:
        return sum(self.consumed_fj)
