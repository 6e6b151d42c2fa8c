"""
CLI tests for the photon-qpt commands.

Invokes the Typer app in-process and checks exit codes, stdout documents and
the files each command writes.
"""

import json
import pytest
import sys
from pathlib import Path

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent.parent))

from src.photon_qpt.cli.app import app
from typer.testing import CliRunner

REVERSED = ["--alpha", "2", "--g0", "0.251", "--n", "1"]


@pytest.fixture
def runner():
    return CliRunner()


def test_help_lists_commands(runner):
    """Top-level help names every command."""
    result = runner.invoke(app, ["--help"])
    assert result.exit_code == 0
    for command in ("point", "sweep", "ed", "figure", "status"):
        assert command in result.stdout


def test_status(runner):
    result = runner.invoke(app, ["status"])
    assert result.exit_code == 0
    assert "Engine Status" in result.stdout
    assert "numpy" in result.stdout


class TestPointCommand:
    """Test the point command."""

    def test_standard_critical_point(self, runner):
        result = runner.invoke(app, ["point", "--chi", "1"])
        assert result.exit_code == 0
        document = json.loads(result.stdout)
        assert document["phase"] == "critical"
        assert document["psi_q"] == 0.0
        assert document["delta_x"] is None

    def test_reversed_transition(self, runner):
        result = runner.invoke(app, ["point", "--chi", "0.05", *REVERSED])
        assert result.exit_code == 0
        document = json.loads(result.stdout)
        assert document["phase"] == "superradiant"
        assert document["psi_q"] == pytest.approx(0.525, abs=1e-9)

    def test_unstable_point(self, runner):
        result = runner.invoke(app, ["point", "--chi", "0.04", *REVERSED])
        assert result.exit_code == 0
        document = json.loads(result.stdout)
        assert document["phase"] == "unstable"
        assert document["psi_q"] is None

    def test_lambda_flag(self, runner):
        result = runner.invoke(app, ["point", "--lambda", "0.6"])
        assert result.exit_code == 0
        assert json.loads(result.stdout)["chi"] == pytest.approx(1.2)

    @pytest.mark.parametrize("args", [
        ["point", "--chi", "0.1", "--lambda", "0.1"],
        ["point"],
        ["point", "--chi", "1", "--Omega", "0"],
        ["point", "--chi", "1", "--g0", "-0.1"],
    ])
    def test_invalid_flags(self, runner, args):
        assert runner.invoke(app, args).exit_code == 2

    def test_verbose_flag(self, runner):
        assert runner.invoke(app, ["-v", "point", "--chi", "0.5"]).exit_code == 0


class TestSweepCommand:
    """Test the sweep command."""

    def test_table_and_manifest(self, runner, tmp_path):
        result = runner.invoke(app, ["sweep", "--axis", "chi=0.01:0.2:400", "-o", str(tmp_path), "-q"])
        assert result.exit_code == 0
        assert result.stdout.strip() == str(tmp_path / "manifest.json")
        assert len((tmp_path / "sweep.csv").read_text(encoding="utf-8").splitlines()) == 401
        manifest = json.loads((tmp_path / "manifest.json").read_text(encoding="utf-8"))
        assert manifest["record_count"] == 400
        assert manifest["files"] == ["sweep.csv"]

    def test_repeat_runs_identical(self, runner, tmp_path):
        args = ["sweep", "--axis", "chi=0.03:0.12:31", "--axis", "g0=0.24:0.27:21", *REVERSED[:2], "--n", "1", "-q"]
        runner.invoke(app, [*args, "-o", str(tmp_path / "first")])
        runner.invoke(app, [*args, "-o", str(tmp_path / "second"), "-w", "4"])
        for name in ("sweep.csv", "manifest.json"):
            assert (tmp_path / "first" / name).read_bytes() == (tmp_path / "second" / name).read_bytes()

    def test_summary_message(self, runner, tmp_path):
        result = runner.invoke(app, ["sweep", "--axis", "chi=0.03,0.05,0.07", *REVERSED, "-o", str(tmp_path)])
        assert result.exit_code == 0
        assert "3 points" in result.output
        assert "unstable=1" in result.output

    @pytest.mark.parametrize("args", [
        ["--axis", "chi=0.2:0.1:5"],
        ["--axis", "chi"],
        ["--axis", "chi=0:1:3", "--axis", "chi=0:1:3"],
        ["--axis", "chi=0:1:3", "--backend", "qmc"],
        ["--axis", "chi=0:1:3", "--backend", "ed"],
    ])
    def test_invalid_arguments(self, runner, tmp_path, args):
        result = runner.invoke(app, ["sweep", *args, "-o", str(tmp_path), "-q"])
        assert result.exit_code == 2

    def test_ed_backend(self, runner, tmp_path):
        result = runner.invoke(app, [
            "sweep", "--axis", "chi=0.05,0.06", *REVERSED, "--backend", "ed", "--N", "2",
            "--max-cutoff", "512", "-o", str(tmp_path), "-q",
        ])
        assert result.exit_code == 0
        header = (tmp_path / "sweep.csv").read_text(encoding="utf-8").splitlines()[0]
        assert header.startswith("chi,s,ground_energy,")
        assert json.loads((tmp_path / "manifest.json").read_text(encoding="utf-8"))["backend"] == "ed"


class TestEDCommand:
    """Test the finite-N study command."""

    def test_files_per_size(self, runner, tmp_path):
        result = runner.invoke(app, [
            "ed", "--N", "2", "--N", "3", "--axis", "chi=0.05,0.06", *REVERSED, "-o", str(tmp_path),
        ])
        assert result.exit_code == 0
        assert "Finite-N Convergence" in result.output
        for size in (2, 3):
            lines = (tmp_path / f"ed_N{size}.csv").read_text(encoding="utf-8").splitlines()
            assert len(lines) == 3
            assert lines[0].startswith("N,chi,")
        manifest = json.loads((tmp_path / "manifest.json").read_text(encoding="utf-8"))
        assert manifest["files"] == ["ed_N2.csv", "ed_N3.csv"]
        assert manifest["status_counts"] == {"ok": 4}

    @pytest.mark.parametrize("args", [
        ["--N", "2", "--axis", "g0=0.1,0.2"],
        ["--N", "0", "--axis", "chi=0.05,0.06"],
        ["--N", "2", "--axis", "chi=0.05,0.06", "--frame", "lab"],
    ])
    def test_invalid_arguments(self, runner, tmp_path, args):
        assert runner.invoke(app, ["ed", *args, "-o", str(tmp_path), "-q"]).exit_code == 2


class TestFigureCommand:
    """Test figure regeneration."""

    def test_unknown_figure(self, runner, tmp_path):
        assert runner.invoke(app, ["figure", "fig6z", "-o", str(tmp_path)]).exit_code == 2

    def test_spectrum_figure(self, runner, tmp_path):
        result = runner.invoke(app, ["figure", "fig2b", "-o", str(tmp_path), "-q"])
        assert result.exit_code == 0
        assert result.stdout.strip() == str(tmp_path / "fig2b_main_manifest.json")
        assert (tmp_path / "fig2b_main.csv").exists()

    @pytest.mark.slow
    def test_phase_diagram_figure(self, runner, tmp_path):
        result = runner.invoke(app, ["figure", "fig4c", "-o", str(tmp_path)])
        assert result.exit_code == 0
        assert "fig4c" in result.output
        contours = json.loads((tmp_path / "fig4c_main_contours.json").read_text(encoding="utf-8"))
        assert contours["psi_q"]["polylines"] == []


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
