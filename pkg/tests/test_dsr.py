"""DSR node behavior over controlled static topologies."""
from conftest import (DIAMOND, LINE4, build_sim, event_lines, inject,
                      static_scenario, tx_lines)
from manetsim.dsr import DsrConfig
from manetsim.engine import SEC


def run(sim, until_s=10.0):
    sim.loop.run_until(round(until_s * SEC))
    return sim.trace.lines


def delivered_uids(lines):
    return {int(line.split(" u=")[1].split(" ")[0])
            for line in event_lines(lines, "deliver")}


def test_discovery_floods_then_delivers_end_to_end(line4_dsr):
    uid = inject(line4_dsr, 0, 3, 1.0)
    lines = run(line4_dsr)
    assert uid in delivered_uids(lines)
    assert len(tx_lines(lines, kind="rreq", node=0)) == 1
    assert len(tx_lines(lines, kind="rrep", node=3)) == 1
    # the data packet walked the discovered chain hop by hop
    hops = [line.split(" to=")[1].split(" ")[0]
            for line in tx_lines(lines, kind="data")]
    assert hops == ["1", "2", "3"]


def test_cached_route_suppresses_new_discovery(line4_dsr):
    inject(line4_dsr, 0, 3, 1.0)
    inject(line4_dsr, 0, 3, 5.0)   # long after the route is cached
    lines = run(line4_dsr)
    assert len(tx_lines(lines, kind="rreq", node=0)) == 1


def test_pending_discovery_buffers_instead_of_reflooding(line4_dsr):
    a = inject(line4_dsr, 0, 3, 1.0)
    b = inject(line4_dsr, 0, 3, 1.001)  # inside the discovery window
    lines = run(line4_dsr)
    assert len(tx_lines(lines, kind="rreq", node=0)) == 1
    assert delivered_uids(lines) == {a, b}


def test_intermediates_drop_duplicate_requests():
    sim = build_sim(static_scenario("dsr", 5), DIAMOND)
    inject(sim, 0, 4, 1.0)
    lines = run(sim)
    for node in (1, 2, 3):
        assert len(tx_lines(lines, kind="rreq", node=node)) <= 1


def test_intermediate_answers_from_cache_without_reflooding():
    # 4 sits behind 0; once 0 holds a route to 3, it answers 4's request
    positions = LINE4 + [(-200.0, 0.0)]
    sim = build_sim(static_scenario("dsr", 5), positions)
    inject(sim, 0, 3, 1.0)        # warms 0's cache
    inject(sim, 4, 3, 5.0)
    lines = run(sim)
    second_flood = [ln for ln in tx_lines(lines, kind="rreq") if " s=4 " in ln]
    assert len(second_flood) == 1           # only 4's own broadcast
    assert len(tx_lines(lines, kind="rrep", node=0)) == 1
    assert len(delivered_uids(lines)) == 2


def test_cache_reply_suppressed_when_it_would_loop():
    # 1 holds a route to 4 that passes back through the requester 0
    positions = LINE4 + [(-200.0, 0.0)]
    sim = build_sim(static_scenario("dsr", 5), positions)
    sim.agents[1].cache.insert((1, 0, 4))
    inject(sim, 0, 4, 1.0)
    lines = run(sim)
    assert tx_lines(lines, kind="rrep", node=1) == []   # no looping reply
    assert len(tx_lines(lines, kind="rreq", node=1)) == 1  # rebroadcast instead
    assert len(delivered_uids(lines)) == 1   # 4 answers directly as destination


def test_salvage_reroutes_after_link_break():
    sim = build_sim(static_scenario("dsr", 5), DIAMOND)
    first = inject(sim, 0, 4, 1.0)          # discovers 0-1-2-4
    # teach 1 the lower-relay detour only after the discovery settles,
    # otherwise 1 answers the flood from cache and reroutes everything
    sim.loop.schedule(round(1.5 * SEC),
                      lambda: sim.agents[1].cache.insert((1, 3, 4)))
    sim.deplete_node(2, 2.0)
    second = inject(sim, 0, 4, 3.0)
    lines = run(sim)
    assert delivered_uids(lines) == {first, second}
    assert len(tx_lines(lines, kind="rerr", node=1)) == 1
    salvage_hops = [ln for ln in tx_lines(lines, kind="data", node=1) if " to=3 " in ln]
    assert len(salvage_hops) == 1


def test_salvage_exhausted_drops_with_cause():
    sim = build_sim(static_scenario("dsr", 5, dsr=DsrConfig(max_salvage_count=0)),
                    DIAMOND)
    inject(sim, 0, 4, 1.0)
    sim.loop.schedule(round(1.5 * SEC),
                      lambda: sim.agents[1].cache.insert((1, 3, 4)))
    sim.deplete_node(2, 2.0)
    doomed = inject(sim, 0, 4, 3.0)
    lines = run(sim)
    drops = event_lines(lines, "drop", cause="salvage-exhausted")
    assert len(drops) == 1 and f"u={doomed}" in drops[0]
    assert doomed not in delivered_uids(lines)


def test_break_without_cached_alternative_drops_as_link_break():
    sim = build_sim(static_scenario("dsr", 4), LINE4)
    inject(sim, 0, 3, 1.0)
    sim.deplete_node(2, 2.0)
    doomed = inject(sim, 0, 3, 3.0)
    lines = run(sim)
    drops = event_lines(lines, "drop", cause="link-break")
    assert any(f"u={doomed}" in d for d in drops)


def test_source_rediscovers_after_error_empties_cache():
    sim = build_sim(static_scenario("dsr", 5), DIAMOND)
    first = inject(sim, 0, 4, 1.0)
    sim.deplete_node(2, 2.0)
    inject(sim, 0, 4, 3.0)                  # dropped at 1, error goes upstream
    third = inject(sim, 0, 4, 4.0)          # no route left: fresh discovery
    lines = run(sim)
    floods = tx_lines(lines, kind="rreq", node=0)
    assert len(floods) == 2
    assert " q=1 " in floods[0] and " q=2 " in floods[1]  # sequence incremented
    assert {first, third}.issubset(delivered_uids(lines))


def test_source_with_surviving_cached_route_skips_discovery():
    sim = build_sim(static_scenario("dsr", 5), DIAMOND)
    sim.agents[0].cache.insert((0, 1, 2, 4))
    sim.agents[0].cache.insert((0, 1, 3, 4))
    sim.deplete_node(2, 0.5)
    lost = inject(sim, 0, 4, 1.0)           # breaks at 1 -> 2, error reaches 0
    second = inject(sim, 0, 4, 2.0)         # surviving route carries it
    lines = run(sim)
    assert tx_lines(lines, kind="rreq") == []
    assert second in delivered_uids(lines)
    assert lost not in delivered_uids(lines)


def test_relaying_a_reply_teaches_the_route_tail():
    sim = build_sim(static_scenario("dsr", 4), LINE4)
    inject(sim, 0, 3, 1.0)
    run(sim)
    assert sim.agents[1].cache.lookup(3) == (1, 2, 3)
    assert sim.agents[2].cache.lookup(3) == (2, 3)


def test_stale_buffered_packets_expire_instead_of_transmitting():
    from manetsim.packets import DataPacket
    sim = build_sim(static_scenario("dsr", 4, run_s=40.0), LINE4)
    agent = sim.agents[0]
    # buffered at t=1, route only materializes after the 30 s buffer timeout
    pkt = DataPacket(uid=77, flow=0, src=0, dst=3, source_route=(), cursor=0,
                     payload_size=512, generated_at=SEC)

    def flush_late():
        agent.cache.insert((0, 1, 2, 3))
        agent._flush_buffer(3)

    sim.loop.schedule(1 * SEC, lambda: agent.buffer.add(pkt, sim.loop.now))
    sim.loop.schedule(35 * SEC, flush_late)
    lines = run(sim, until_s=40.0)
    drops = event_lines(lines, "drop", cause="buffer-expired")
    assert len(drops) == 1 and "u=77" in drops[0]
    assert [ln for ln in tx_lines(lines, kind="data") if "u=77" in ln] == []
