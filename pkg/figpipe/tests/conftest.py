"""Generate logs through the adepth CLI (the pipeline's only upstream interface)."""

import subprocess
import sys

import pytest


def _adepth_run(scenario: str, out_dir, extra=()):
    cmd = [sys.executable, "-m", "adepth.cli", "run", scenario, "--out", str(out_dir), *extra]
    subprocess.run(cmd, check=True, capture_output=True, text=True)


@pytest.fixture(scope="session")
def shipped_logs(tmp_path_factory):
    """CSV logs of the shipped fig1-fig3 scenarios (shortened horizon)."""
    root = tmp_path_factory.mktemp("logs")
    _adepth_run("fig1", root / "fig1", ("--dt", "0.01", "--horizon", "20"))
    _adepth_run("fig2", root / "fig2", ("--dt", "0.01", "--horizon", "20"))
    _adepth_run("fig3", root / "fig3", ("--dt", "0.01", "--horizon", "30"))
    return {
        "fig1": sorted((root / "fig1").glob("*.csv")),
        "fig2": [root / "fig2" / "run.csv"],
        "fig3": [root / "fig3" / "run.csv"],
    }
