"""Suite orchestration, CSV layout, CLI verbs, and reproducibility."""
import os

import pytest

from manetsim.cli import main
from manetsim.mobility import Arena
from manetsim.runner import (RESULT_COLUMNS, figure_csvs, results_csv,
                             run_suite)
from manetsim.scenario import (MobilityConfig, Scenario, SweepSuite,
                               TrafficConfig)


def tiny_scenario(name="tiny", **overrides) -> Scenario:
    defaults = dict(
        name=name, node_count=10, run_length_s=20.0,
        arena=Arena(400.0, 400.0, 250.0),
        mobility=MobilityConfig(pause_s=2.0),
        traffic=TrafficConfig(sessions=2, start_window_s=4.0),
        seeds=(1, 2),
    )
    defaults.update(overrides)
    return Scenario(**defaults)


def tiny_suite() -> SweepSuite:
    return SweepSuite("node-density",
                      1.0, (tiny_scenario("a"), tiny_scenario("b", node_count=12)))


class TestRunSuite:
    def test_row_count_and_aggregates(self):
        result = run_suite(tiny_suite(), jobs=1)
        assert len(result.results) == 2 * 2 * 2  # points x protocols x seeds
        csv_text = results_csv(result)
        lines = csv_text.strip().split("\n")
        assert lines[0] == ",".join(RESULT_COLUMNS)
        records = [ln.split(",")[0] for ln in lines[1:]]
        assert records.count("run") == 8
        for agg in ("mean", "std", "min", "max"):
            assert records.count(agg) == 4  # one per (point, protocol)

    def test_outputs_are_reproducible(self, tmp_path):
        out1, out2 = tmp_path / "one", tmp_path / "two"
        run_suite(tiny_suite(), jobs=1, outdir=str(out1))
        run_suite(tiny_suite(), jobs=2, outdir=str(out2))
        for name in sorted(os.listdir(out1)):
            a = (out1 / name).read_bytes()
            b = (out2 / name).read_bytes()
            assert a == b, f"{name} differs between reruns"

    def test_figure_csvs_cover_each_metric(self):
        result = run_suite(tiny_suite(), jobs=1)
        figs = figure_csvs(result)
        assert sorted(figs) == [
            f"fig_{m}_vs_node-density.csv"
            for m in ("cep", "mrer", "nro", "pdf", "sdcen")
        ]
        body = figs["fig_pdf_vs_node-density.csv"].strip().split("\n")
        assert body[0] == "point,dsr_mean,dsr_std,dsr_n,meadsr_mean,meadsr_std,meadsr_n"
        assert len(body) == 3  # two density points

    def test_traces_named_by_hash_and_seed(self, tmp_path):
        scn = tiny_scenario(seeds=(5,))
        suite = SweepSuite("node-density", 1.0, (scn,))
        run_suite(suite, protocols=("dsr",), jobs=1, outdir=str(tmp_path))
        expected = f"trace-{scn.with_protocol('dsr').config_hash()}-5.log"
        assert expected in os.listdir(tmp_path)

    def test_aborted_run_identifies_the_tuple(self, monkeypatch):
        import manetsim.runner as runner_mod
        from manetsim.engine import SimulationError

        def explode(scenario, seed, positions=None):
            raise SimulationError("injected failure")

        monkeypatch.setattr(runner_mod, "run_single", explode)
        suite = SweepSuite("node-density", 1.0, (tiny_scenario("boom", seeds=(3,)),))
        with pytest.raises(RuntimeError, match=r"scenario=boom.*protocol=dsr.*seed=3"):
            run_suite(suite, protocols=("dsr",), jobs=1)


SCENARIO_TEXT = """\
nodes: 10
protocol: dsr
run_length: 20
arena: {width: 400, height: 400, range: 250}
mobility: {pause: 2, speed: moderate}
traffic: {sessions: 2, rate: 4, start_window: 4}
seeds: [1]
"""


class TestCli:
    def test_validate_ok(self, tmp_path, capsys):
        path = tmp_path / "demo.yaml"
        path.write_text(SCENARIO_TEXT)
        assert main(["validate", str(path)]) == 0
        out = capsys.readouterr().out
        assert "ok: demo" in out and "hash=" in out

    def test_validate_rejects_unknown_key(self, tmp_path, capsys):
        path = tmp_path / "bad.yaml"
        path.write_text("nodes: 10\nbogus: 1\n")
        assert main(["validate", str(path)]) == 1
        assert "bogus" in capsys.readouterr().err

    def test_run_writes_results(self, tmp_path):
        path = tmp_path / "demo.yaml"
        path.write_text(SCENARIO_TEXT)
        out = tmp_path / "out"
        assert main(["run", str(path), "--out", str(out)]) == 0
        assert (out / "results.csv").exists()
        assert any(n.startswith("trace-") for n in os.listdir(out))

    def test_environment_variable_overrides_outdir(self, tmp_path, monkeypatch):
        path = tmp_path / "demo.yaml"
        path.write_text(SCENARIO_TEXT)
        target = tmp_path / "env-out"
        monkeypatch.setenv("MANETSIM_OUT", str(target))
        assert main(["run", str(path), "--no-traces"]) == 0
        assert (target / "results.csv").exists()

    def test_plot_renders_charts(self, tmp_path):
        out = tmp_path / "res"
        run_suite(tiny_suite(), jobs=1, outdir=str(out), write_traces=False)
        assert main(["plot", str(out)]) == 0
        charts = os.listdir(out / "charts")
        assert len(charts) == 5
        assert all(c.endswith(".svg") for c in charts)

    def test_plot_fails_on_empty_dir(self, tmp_path):
        assert main(["plot", str(tmp_path)]) == 1

    def test_suite_smoke(self, tmp_path):
        rc = main(["suite", "node-density", "--scale", "0.2", "--seeds", "1",
                   "--protocols", "dsr", "--jobs", "1",
                   "--out", str(tmp_path / "suite-out"), "--no-traces"])
        assert rc == 0
        assert (tmp_path / "suite-out" / "results.csv").exists()
