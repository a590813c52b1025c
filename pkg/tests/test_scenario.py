import pytest

from manetsim.scenario import (SPEED_CLASSES, Scenario, ScenarioFormatError,
                               ScenarioValueError, UnknownKeyError,
                               build_suite, load_scenario, scenario_from_dict)


class TestLoading:
    def test_minimal_file_fills_documented_defaults(self):
        scn = scenario_from_dict({"nodes": 50, "protocol": "mea-dsr"})
        assert scn.node_count == 50
        assert scn.protocol == "mea-dsr"
        assert scn.run_length_s == 600.0
        assert (scn.arena.width, scn.arena.height, scn.arena.tx_range) == (1000.0, 1000.0, 250.0)
        assert scn.mobility.pause_s == 100.0
        assert scn.mobility.speed == SPEED_CLASSES["moderate"]
        assert scn.traffic.rate == 4.0
        assert scn.traffic.payload == 512
        assert scn.energy.initial_j == 100.0
        assert scn.energy.tx_power_w == 1.4
        assert scn.energy.rx_power_w == 1.0
        assert scn.link.bandwidth_bps == 2_000_000
        assert scn.link.queue_capacity == 50
        assert scn.seeds == (1,)

    def test_unknown_top_level_key_rejected(self):
        with pytest.raises(UnknownKeyError, match="wibble"):
            scenario_from_dict({"nodes": 10, "wibble": 1})

    def test_unknown_section_key_rejected(self):
        with pytest.raises(UnknownKeyError, match="warp"):
            scenario_from_dict({"mobility": {"warp": 9}})

    def test_negative_pause_rejected(self):
        with pytest.raises(ScenarioValueError):
            scenario_from_dict({"mobility": {"pause": -1}})

    def test_speed_class_names_map_to_intervals(self):
        scn = scenario_from_dict({"mobility": {"speed": "high"}})
        assert scn.mobility.speed == (20.0, 25.0)
        scn = scenario_from_dict({"mobility": {"speed": [2.0, 3.0]}})
        assert scn.mobility.speed == (2.0, 3.0)

    def test_unknown_speed_class_rejected(self):
        with pytest.raises(ScenarioValueError, match="speed class"):
            scenario_from_dict({"mobility": {"speed": "ludicrous"}})

    def test_unknown_protocol_rejected(self):
        with pytest.raises(ScenarioValueError, match="protocol"):
            scenario_from_dict({"protocol": "aodv"})

    def test_file_round_trip(self, tmp_path):
        path = tmp_path / "demo.yaml"
        path.write_text("nodes: 12\nprotocol: dsr\nseeds: [3, 4]\n")
        scn = load_scenario(path)
        assert scn.name == "demo"
        assert scn.node_count == 12
        assert scn.seeds == (3, 4)

    def test_malformed_file_is_a_format_error(self, tmp_path):
        path = tmp_path / "bad.yaml"
        path.write_text("nodes: [unclosed\n")
        with pytest.raises(ScenarioFormatError):
            load_scenario(path)

    def test_empty_file_rejected(self, tmp_path):
        path = tmp_path / "empty.yaml"
        path.write_text("")
        with pytest.raises(ScenarioFormatError):
            load_scenario(path)

    def test_section_must_be_mapping(self):
        with pytest.raises(ScenarioFormatError):
            scenario_from_dict({"mobility": 5})


class TestHash:
    def test_stable_across_calls(self):
        a = scenario_from_dict({"nodes": 30})
        b = scenario_from_dict({"nodes": 30})
        assert a.config_hash() == b.config_hash()

    def test_sensitive_to_protocol_but_not_seeds(self):
        base = scenario_from_dict({"nodes": 30, "seeds": [1, 2]})
        other_seeds = scenario_from_dict({"nodes": 30, "seeds": [9]})
        assert base.config_hash() == other_seeds.config_hash()
        assert base.config_hash() != base.with_protocol("dsr").config_hash()


class TestSuites:
    def test_mobility_axis_enumerates_pause_by_speed_grid(self):
        suite = build_suite("mobility-pause")
        assert len(suite.points) == 21  # 7 pause points x 3 speed classes
        pauses = {p.mobility.pause_s for p in suite.points}
        assert pauses == {0, 100, 200, 300, 400, 500, 600}

    def test_density_axis(self):
        suite = build_suite("node-density")
        assert [p.node_count for p in suite.points] == [50, 60, 70, 80, 90, 100]
        assert all(p.mobility.pause_s == 100.0 for p in suite.points)
        assert all(p.mobility.speed == SPEED_CLASSES["moderate"] for p in suite.points)

    def test_rate_axis(self):
        suite = build_suite("send-rate")
        assert [p.traffic.rate for p in suite.points] == [2, 4, 6, 8, 10, 12]
        assert all(p.traffic.sessions == 10 for p in suite.points)

    def test_session_axis(self):
        suite = build_suite("session-count")
        assert [p.traffic.sessions for p in suite.points] == [10, 15, 20, 25, 30, 35, 40]
        assert all(p.traffic.rate == 4.0 for p in suite.points)

    def test_desk_scale_shrinks_proportionally_but_keeps_range(self):
        suite = build_suite("mobility-pause", scale=0.5)
        point = suite.points[0]
        assert point.node_count == 25
        assert point.arena.width == 500.0
        assert point.arena.height == 500.0
        assert point.arena.tx_range == 250.0
        assert point.run_length_s == 300.0
        assert {p.mobility.pause_s for p in suite.points} == {0, 50, 100, 150, 200, 250, 300}
        assert point.traffic.start_window_s == 60.0

    def test_unknown_axis_rejected(self):
        with pytest.raises(ScenarioValueError):
            build_suite("frequency")

    def test_seeds_propagate(self):
        suite = build_suite("node-density", seeds=(1, 2, 3))
        assert all(p.seeds == (1, 2, 3) for p in suite.points)
