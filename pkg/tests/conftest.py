"""Shared fixtures: the full-scale study runs are expensive, so run them once."""

import numpy as np
import pytest

from adepth.cli import load_config, resolve_config_path
from adepth.simulation import run_scenario, ScenarioConfig


@pytest.fixture(scope="session")
def fig1_runs(tmp_path_factory):
    """All three strategies of the shipped fig1 config at full scale, with CSVs."""
    out = tmp_path_factory.mktemp("fig1")
    base, strategies = load_config(resolve_config_path("fig1"))
    assert strategies == ["case_a", "case_b", "baseline_origin"]
    runs = {}
    for strategy in strategies:
        cfg = ScenarioConfig(**{**base.__dict__, "strategy": strategy, "name": f"fig1_{strategy}"})
        logrun = run_scenario(cfg)
        csv_path = logrun.to_csv(out / f"{strategy}.csv")
        runs[strategy] = (logrun, csv_path)
    return runs


@pytest.fixture(scope="session")
def fig3_run():
    """The shipped circular-reference scenario at full scale."""
    base, strategies = load_config(resolve_config_path("fig3"))
    assert strategies == ["case_a"]
    return run_scenario(base)


@pytest.fixture()
def rng():
    return np.random.default_rng(20240811)
