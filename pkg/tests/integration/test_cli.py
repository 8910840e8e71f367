"""
Integration tests for the command-line interface.
"""

import shutil
import tempfile
from pathlib import Path

import pytest
from click.testing import CliRunner

import src.main as main
from src.main import CliCommand, cli, dispatch
from src.utils.errors import ExportError, NumericDomainError

SCENARIOS = Path(__file__).resolve().parents[2] / "scenarios"


@pytest.mark.integration
class TestCli:
    """Every verb end to end, with exit codes and output files."""

    def setup_method(self):
        self.temp_dir = Path(tempfile.mkdtemp())
        self.runner = CliRunner()

    def teardown_method(self):
        shutil.rmtree(self.temp_dir, ignore_errors=True)

    def _invoke(self, verb, scenario, out, *extra):
        args = [verb, "--config", str(scenario), "--out", str(out), *extra]
        return self.runner.invoke(cli, args)

    def test_help_lists_every_verb(self):
        result = self.runner.invoke(cli, ["--help"])
        assert result.exit_code == 0
        for verb in main.VERBS:
            assert verb in result.output

    def test_solve_writes_solution(self):
        out = self.temp_dir / "solve"
        result = self._invoke("solve", SCENARIOS / "default.cfg", out, "--set", "scenario.n_nodes=5")
        assert result.exit_code == 0, result.output
        assert (out / "solution.csv").exists()
        assert (out / "scenario.cfg").exists()
        assert "w_min=" in result.output

    def test_infeasible_solve_exits_two(self):
        out = self.temp_dir / "infeasible"
        result = self._invoke("solve", SCENARIOS / "default.cfg", out, "--set", "consumption.c_static=1")
        assert result.exit_code == 2, result.output
        header, row = (out / "solution.csv").read_text().splitlines()[:2]
        assert row.startswith("0.0000000000000000e+00")
        assert row.endswith(",False")

    def test_zero_rate_solve_exits_two(self):
        scenario = self.temp_dir / "far_node.cfg"
        scenario.write_text("scenario.n_nodes = 1\n"
                            "geometry.kind = fixed_ring\n"
                            "geometry.radius_m = 50\n"
                            "consumption.e_coeff = 1e-3\n"
                            "consumption.c_static = 0\n"
                            "eh.kind = linear\n"
                            "eh.alpha = 0.3\n")
        out = self.temp_dir / "far"
        result = self._invoke("solve", scenario, out)
        assert result.exit_code == 2, result.output
        row = (out / "solution.csv").read_text().splitlines()[1]
        assert row.startswith("0.0000000000000000e+00")
        assert row.endswith(",False")

    def test_invalid_sweep_point_exits_one(self):
        scenario = self.temp_dir / "hole.cfg"
        scenario.write_text("scenario.n_nodes = 2\n"
                            "scenario.trials = 1\n"
                            "geometry.kind = annulus\n"
                            "geometry.inner_m = 25\n"
                            "geometry.outer_m = 50\n"
                            "sweep.parameter = radius\n"
                            "sweep.values = 10, 40\n")
        out = self.temp_dir / "hole"
        result = self._invoke("sweep", scenario, out)
        assert result.exit_code == 1, result.output
        assert "sweep.values" in result.output
        assert not (out / "sweep.csv").exists()

    def test_unwritable_output_exits_four(self):
        blocker = self.temp_dir / "blocker"
        blocker.write_text("not a directory")
        result = self._invoke("solve", SCENARIOS / "default.cfg", blocker / "out",
                              "--set", "scenario.n_nodes=3")
        assert result.exit_code == 4, result.output
        assert "Export error" in result.output

    def test_sweep_header_and_reproducibility(self):
        first, second = self.temp_dir / "first", self.temp_dir / "second"
        extra = ("--set", "scenario.trials=2", "--set", "scenario.n_nodes=4")
        for out in (first, second):
            result = self._invoke("sweep", SCENARIOS / "static_energy_sweep.cfg", out, *extra)
            assert result.exit_code == 0, result.output
        table = (first / "sweep.csv").read_bytes()
        assert table.splitlines()[0] == b"parameter_value,method,mean_w,stderr_w,trials"
        assert table == (second / "sweep.csv").read_bytes()

    def test_seed_changes_the_sweep(self):
        tables = []
        for seed in ("1", "2"):
            out = self.temp_dir / f"seed{seed}"
            result = self._invoke("sweep", SCENARIOS / "static_energy_sweep.cfg", out,
                                  "--set", "scenario.trials=2", "--set", "scenario.n_nodes=4", "--seed", seed)
            assert result.exit_code == 0, result.output
            tables.append((out / "sweep.csv").read_bytes())
            assert f"scenario.master_seed = {seed}" in (out / "scenario.cfg").read_text()
        assert tables[0] != tables[1]

    def test_sweep_without_sweep_section_is_config_error(self):
        result = self._invoke("sweep", SCENARIOS / "default.cfg", self.temp_dir / "none")
        assert result.exit_code == 1

    def test_convergence(self):
        out = self.temp_dir / "convergence"
        result = self._invoke("convergence", SCENARIOS / "annulus_convergence.cfg", out)
        assert result.exit_code == 0, result.output
        lines = (out / "convergence.csv").read_text().splitlines()
        assert lines[0] == "iter,w_lo,w_hi,w_mid,e_s_star,p_pilot"
        assert 1 < len(lines) <= 18

    def test_peb_gain(self):
        out = self.temp_dir / "peb"
        result = self._invoke("peb-gain", SCENARIOS / "default.cfg", out)
        assert result.exit_code == 0, result.output
        lines = (out / "peb_gain.csv").read_text().splitlines()
        assert lines[0] == "p_pilot_watts,gain,stderr"
        assert len(lines) == 51

    def test_compare_eh(self):
        out = self.temp_dir / "compare"
        result = self._invoke("compare-eh", SCENARIOS / "default.cfg", out,
                              "--set", "scenario.trials=2", "--set", "scenario.n_nodes=4")
        assert result.exit_code == 0, result.output
        lines = (out / "compare.csv").read_text().splitlines()
        assert lines[0] == "trial,w_nl,w_l,rel_err"
        assert len(lines) == 3

    def test_validate_writes_nothing(self):
        out = self.temp_dir / "validate"
        result = self._invoke("validate", SCENARIOS / "default.cfg", out)
        assert result.exit_code == 0, result.output
        assert "monotone=True" in result.output
        assert not (out / "scenario.cfg").exists()

    def test_unknown_key_exits_one(self):
        result = self._invoke("solve", SCENARIOS / "default.cfg", self.temp_dir / "bad",
                              "--set", "scenario.colour=red")
        assert result.exit_code == 1
        assert "scenario.colour" in result.output

    def test_missing_scenario_exits_one(self):
        result = self._invoke("solve", self.temp_dir / "absent.cfg", self.temp_dir / "bad")
        assert result.exit_code == 1

    def test_negative_seed_rejected_by_click(self):
        result = self._invoke("solve", SCENARIOS / "default.cfg", self.temp_dir / "bad", "--seed", "-1")
        assert result.exit_code == 2
        assert not (self.temp_dir / "bad").exists()


class TestDispatch:

    def setup_method(self):
        self.temp_dir = Path(tempfile.mkdtemp())

    def teardown_method(self):
        shutil.rmtree(self.temp_dir, ignore_errors=True)

    def test_numeric_failure_exits_three(self, monkeypatch):
        def fail(cfg, exporter):
            raise NumericDomainError("negative discriminant")

        monkeypatch.setitem(main.HANDLERS, 'solve', fail)
        cmd = CliCommand('solve', SCENARIOS / "default.cfg", output_dir=self.temp_dir)
        assert dispatch(cmd) == 3

    def test_seed_becomes_override(self):
        cmd = CliCommand('solve', SCENARIOS / "default.cfg", overrides=("scenario.trials=2",), seed=5)
        assert cmd.effective_overrides() == ("scenario.trials=2", "scenario.master_seed=5")

    def test_unknown_verb(self):
        with pytest.raises(ValueError, match="Unknown verb"):
            CliCommand('optimise', SCENARIOS / "default.cfg")

    def test_export_failure_exits_four(self, monkeypatch):
        def fail(cfg, exporter):
            raise ExportError("disk full")

        monkeypatch.setitem(main.HANDLERS, 'solve', fail)
        cmd = CliCommand('solve', SCENARIOS / "default.cfg", output_dir=self.temp_dir)
        assert dispatch(cmd) == 4
