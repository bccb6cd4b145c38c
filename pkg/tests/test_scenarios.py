import numpy as np
import pytest

from stepgraphon import io
from stepgraphon.metrics import Coupling
from stepgraphon.scenarios import (
    chains_scenario,
    chessboard_scenario,
    counterexample_scenario,
    flatness_scenario,
    multiway_scenario,
    reproduce,
)


def test_chessboard_scenario_passes():
    ok, report = chessboard_scenario()
    assert ok
    rows = report["rows"]
    assert rows[-1]["weak_star_distance"] < 0.01
    assert len(rows) == 7


def test_counterexample_scenario_passes():
    ok, report = counterexample_scenario()
    assert ok
    for row in report["rows"]:
        assert row["u2_strip_ok"] and row["sandwich_ok"] and row["raster_ok"]


def test_flatness_scenario_passes():
    ok, report = flatness_scenario()
    assert ok
    assert report["forward_feasible"] and not report["backward_feasible"]


def test_chains_scenario_passes():
    ok, report = chains_scenario(seed=1, trials=2)
    assert ok
    for row in report["rows"]:
        assert row["l1"][-1] < 1e-12


def test_multiway_scenario_passes():
    ok, report = multiway_scenario(seed=2, trials=2)
    assert ok
    assert report["constants_distance"] == 1.0


def test_reproduce_dispatch():
    ok, report = reproduce("flatness")
    assert ok and report["scenario"] == "flatness"
    with pytest.raises(ValueError):
        reproduce("nonsense")


def test_reproduce_counterexample_single_eps():
    ok, report = reproduce("counterexample", eps=2 ** -5)
    assert ok
    assert len(report["rows"]) == 1


def test_coupling_json_roundtrip(tmp_path):
    c = Coupling([[0.25, 0.25], [0.25, 0.25]])
    path = tmp_path / "c.json"
    io.save(c, path)
    c2 = io.load_coupling(path)
    assert np.allclose(c.matrix, c2.matrix)
    assert np.allclose(c.row_marginal, c2.row_marginal)


def test_reproduce_tolerance_overrides():
    ok, report = reproduce("chessboard", tolerances={"threshold": 0.5})
    assert ok and report["threshold"] == 0.5
    # an impossible slack flips the chains verdict
    ok, _ = reproduce("chains", seed=1, tolerances={"cut_slack": -1.0})
    assert not ok
    ok, _ = reproduce("flatness", tolerances={"residual": 1e-6})
    assert ok
