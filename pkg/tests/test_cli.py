"""Tests for the command-line front-end."""

import pytest
from pydantic import ValidationError

from phasedrift.cli import build_parser, config_from_args, main
from phasedrift.models.config import (
    FIG1_SIGMAS,
    FIG2_SIGMAS,
    OPERATIONS_SIGMAS,
    WATCHDOG_SIGMAS,
)
from phasedrift.models.watchdog import WatchdogMode


def parse(*argv):
    return config_from_args(build_parser().parse_args(list(argv)))


class TestConfigFromArgs:
    """Tests for argument parsing into ExperimentConfig."""

    def test_fig2_defaults(self):
        """Test the default sweep."""
        config = parse("fig2")
        assert config.sigmas == FIG2_SIGMAS
        assert (config.n, config.y, config.q_bits) == (15, 7, 8)
        assert config.runs == 20
        assert str(config.circuit) == "full"
        assert config.mean_eps_for(0.01) == 0.0

    def test_fig1_defaults(self):
        """Test the distribution experiment includes σ = 0.05."""
        assert parse("fig1").sigmas == FIG1_SIGMAS

    def test_watchdog_defaults(self):
        """Test three multipliers and ε̄ = 1.1σ."""
        config = parse("watchdog")
        assert config.sigmas == WATCHDOG_SIGMAS
        assert str(config.circuit) == "truncated:3"
        assert config.mean_eps_for(0.001) == pytest.approx(0.0011)

    def test_watchdog_explicit_mean_eps(self):
        """Test an explicit shift replaces the default ratio."""
        config = parse("watchdog", "--mean-eps", "0.002")
        assert config.mean_eps_for(0.001) == 0.002
        assert config.mean_eps_ratio is None

    def test_repeated_sigma(self):
        """Test --sigma accumulates."""
        assert parse("fig2", "--sigma", "0.001", "--sigma", "0.01").sigmas == (0.001, 0.01)

    def test_options(self, tmp_path):
        """Test the remaining flags."""
        config = parse(
            "fig2",
            "--n", "5",
            "--y", "2",
            "--q-bits", "5",
            "--runs", "4",
            "--seed", "7",
            "--circuit", "optimized",
            "--watchdog", "partial",
            "--out", str(tmp_path),
            "--jobs", "2",
            "--l", "13",
            "--dump-pulses",
        )
        assert (config.n, config.y, config.q_bits, config.runs) == (5, 2, 5, 4)
        assert config.master_seed == 7
        assert config.circuit.optimized
        assert config.watchdog is WatchdogMode.PARTIAL
        assert config.out_dir == tmp_path
        assert (config.jobs, config.l) == (2, 13)
        assert config.dump_pulses and not config.dump_state

    def test_operations_defaults(self):
        """Test the operations sweep sigma."""
        config = parse("operations")
        assert config.sigmas == OPERATIONS_SIGMAS
        assert config.shots == 0

    def test_shots(self):
        """Test --shots reaches the configuration."""
        assert parse("fig1", "--shots", "500").shots == 500

    def test_negative_shots_rejected(self):
        """Test that negative shot counts are rejected."""
        with pytest.raises(ValidationError):
            parse("fig1", "--shots", "-1")

    def test_bad_circuit_mode(self):
        """Test that malformed circuit modes are rejected by the parser."""
        with pytest.raises(SystemExit):
            build_parser().parse_args(["fig2", "--circuit", "truncated:x"])

    def test_mean_eps_options_exclusive(self):
        """Test --mean-eps and --mean-eps-ratio cannot be combined."""
        with pytest.raises(SystemExit):
            build_parser().parse_args(["fig2", "--mean-eps", "0.1", "--mean-eps-ratio", "1"])

    def test_unknown_experiment(self):
        """Test the experiment choice."""
        with pytest.raises(SystemExit):
            build_parser().parse_args(["fig3"])


class TestMain:
    """Tests for main()."""

    def test_counts(self, tmp_path, capsys):
        """Test the counts experiment prints tallies and the written file."""
        code = main(["counts", "--n", "5", "--y", "2", "--q-bits", "5", "--out", str(tmp_path)])
        out = capsys.readouterr().out
        assert code == 0
        assert "erroneous_fraction=" in out
        assert str(tmp_path / "counts.csv") in out

    def test_fig2_small(self, tmp_path, capsys):
        """Test a small sweep end to end."""
        argv = ["fig2", "--n", "5", "--y", "2", "--q-bits", "5", "--sigma", "0", "--runs", "2"]
        code = main([*argv, "--out", str(tmp_path)])
        assert code == 0
        assert (tmp_path / "fig2_sweep.csv").exists()
        assert "fig2_sweep.csv" in capsys.readouterr().out

    def test_operations_small(self, tmp_path, capsys):
        """Test the operations sweep end to end on two multipliers."""
        argv = ["operations", "--n", "5", "--y", "2", "--q-bits", "5", "--circuit", "truncated:2"]
        code = main([*argv, "--sigma", "0", "--runs", "1", "--out", str(tmp_path)])
        assert code == 0
        assert (tmp_path / "operations_sweep.csv").exists()
        assert "operations_sweep.csv" in capsys.readouterr().out

    def test_fig1_shots(self, tmp_path):
        """Test sampled readouts from the command line."""
        argv = ["fig1", "--n", "5", "--y", "2", "--q-bits", "5", "--sigma", "0", "--shots", "50"]
        assert main([*argv, "--out", str(tmp_path)]) == 0
        assert (tmp_path / "fig1c_samples_sigma0.csv").exists()
        assert (tmp_path / "fig1_factoring.csv").exists()

    def test_invalid_config_exits(self, tmp_path):
        """Test that an invalid instance is a usage error."""
        with pytest.raises(SystemExit) as exc_info:
            main(["counts", "--n", "15", "--y", "5", "--out", str(tmp_path)])
        assert exc_info.value.code == 2

    def test_construction_error_exit_code(self, tmp_path, capsys):
        """Test that a layout beyond the work-qubit limit exits with status 1."""
        code = main(["counts", "--n", "21", "--y", "2", "--q-bits", "9", "--out", str(tmp_path)])
        assert code == 1
        assert "phasedrift:" in capsys.readouterr().err
