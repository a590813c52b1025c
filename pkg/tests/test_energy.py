import pytest

from manetsim.energy import EnergyLedger, EnergyModel, charge_fj, to_fj, to_j

AIRTIME_512B = 2_048_000  # ns at 2 Mb/s
AIRTIME_32B = 128_000


def ledger(n=1, initial=100.0, **model):
    return EnergyLedger(n, initial, EnergyModel(**model))


def test_tx_charge_for_a_data_packet():
    led = ledger()
    fj, truncated = led.charge_tx(0, AIRTIME_512B)
    assert not truncated
    assert fj == 1_400_000 * 2_048_000          # exactly 2.8672 mJ
    assert to_j(fj) == pytest.approx(0.0028672, rel=1e-12)


def test_tx_charge_for_a_small_control_packet():
    led = ledger()
    fj, _ = led.charge_tx(0, AIRTIME_32B)
    assert to_j(fj) == pytest.approx(0.0001792, rel=1e-12)  # 0.1792 mJ


def test_rx_charge():
    led = ledger()
    fj, _ = led.charge_rx(0, AIRTIME_512B)
    assert fj == 1_000_000 * 2_048_000          # exactly 2.048 mJ
    assert to_j(fj) == pytest.approx(0.002048, rel=1e-12)


def test_charge_is_linear_in_airtime():
    assert charge_fj(1_400_000, 2 * AIRTIME_512B) == 2 * charge_fj(1_400_000, AIRTIME_512B)


def test_residual_ratio():
    led = ledger(initial=100.0)
    assert led.residual_ratio(0) == 1.0
    led.consumed_fj[0] = to_fj(46.3)
    assert led.residual_ratio(0) == pytest.approx(0.537, rel=1e-12)
    led.consumed_fj[0] = led.initial_fj[0]
    led.alive_flags[0] = False
    assert led.residual_ratio(0) == 0.0


def test_initial_energy_must_be_positive():
    with pytest.raises(ValueError):
        ledger(initial=0.0)
    with pytest.raises(ValueError):
        EnergyModel(tx_power_w=0.0)


def test_overdraw_truncates_at_depletion_and_kills_the_node():
    led = ledger(initial=1e-9)  # 1 nJ: far less than one packet's airtime cost
    fj, truncated = led.charge_tx(0, AIRTIME_512B)
    assert truncated
    assert fj == led.initial_fj[0]
    assert not led.alive(0)
    assert led.residual_fj(0) == 0


def test_exact_depletion_is_not_truncated_but_still_kills():
    led = ledger()
    want = charge_fj(1_400_000, AIRTIME_512B)
    led.consumed_fj[0] = led.initial_fj[0] - want
    fj, truncated = led.charge_tx(0, AIRTIME_512B)
    assert not truncated
    assert fj == want
    assert not led.alive(0)


def test_consumed_is_sum_of_charges():
    led = ledger()
    total = 0
    for airtime in (AIRTIME_512B, AIRTIME_32B, 777_000):
        fj, _ = led.charge_tx(0, airtime)
        total += fj
        fj, _ = led.charge_rx(0, airtime)
        total += fj
    assert led.consumed_fj[0] == total
    assert led.residual_fj(0) == led.initial_fj[0] - total


def test_drain_empties_the_battery():
    led = ledger()
    led.charge_tx(0, AIRTIME_512B)
    fj = led.drain(0)
    assert led.residual_fj(0) == 0
    assert fj == led.initial_fj[0] - 1_400_000 * 2_048_000
    assert not led.alive(0)


def test_unit_conversions_round_trip():
    assert to_fj(100.0) == 10**17
    assert to_j(10**17) == 100.0
