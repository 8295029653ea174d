import json
import os
from pathlib import Path

import numpy as np
import pytest

import kdplan

SCENARIOS = Path(os.environ.get("KDPLAN_SOURCE_DIR", Path(__file__).resolve().parents[2])) / "scenarios"


def test_signed_distance_matches_numpy():
    cloud = kdplan.random_world(n_obstacles=10, seed=3)
    m = kdplan.InstanceMap(cloud, inflation=0.3)
    assert len(m) == len(cloud)
    rng = np.random.default_rng(0)
    for p in rng.uniform(0, 20, size=(20, 3)):
        expect = np.min(np.linalg.norm(cloud - p, axis=1)) - 0.3
        assert m.signed_distance(p) == pytest.approx(expect, abs=1e-9)


def test_search_space_samples_inside():
    bounds = kdplan.Aabb(np.zeros(3), np.full(3, 20.0))
    e = kdplan.build_search_space([5, 10, 10], [15, 10, 10], bounds)
    assert np.all(e.semi_axes >= 4.0)
    pts = kdplan.generate_interior_points(e, 8, bounds)
    assert pts.shape[1] == 3 and len(pts) > 100
    q = (pts - e.center) @ e.rotation
    assert np.all(np.sum((q / e.semi_axes) ** 2, axis=1) <= 1 + 1e-9)


def test_plan_smooth_and_fit():
    cloud = kdplan.random_world(seed=7)
    m = kdplan.InstanceMap(cloud, inflation=0.3)
    sel = kdplan.plan_and_select(m, [5, 10, 10], [15, 10, 10])
    wps = sel["selected"]["waypoints"]
    assert np.allclose(wps[0], [5, 10, 10])
    assert sel["selected"]["cost"] == pytest.approx(kdplan.path_cost(wps, sel["selected"]["goal"]))
    costs = [c["cost"] for c in sel["all"]]
    assert costs == sorted(costs)

    out = kdplan.smooth_path(wps, m)
    assert out["positions"].shape[1] == 3
    assert len(out["segments"]) == len(out["segment_costs"])
    for seg in out["segments"]:
        h = seg["cost_history"]
        assert all(b <= a for a, b in zip(h, h[1:]))

    spline = kdplan.fit_bspline(out["positions"], 1.5)
    p0, _, _ = spline.sample(0.0)
    assert np.allclose(p0, out["positions"][0])
    with pytest.raises(IndexError):
        spline.sample(spline.duration + 1.0)


def test_astar_and_errors():
    m = kdplan.InstanceMap(np.zeros((0, 3)))
    cfg = kdplan.PlannerConfig()
    res = kdplan.plan_a_star(m, [2, 2, 2], [6, 2, 2], cfg)
    assert res["waypoints"].shape[1] == 3
    cfg.d_safe = -1.0
    with pytest.raises(kdplan.ValidationError):
        cfg.validate()
    with pytest.raises(ValueError):
        cfg.sampler_mode = "nonsense"


def test_dynamics_hover():
    vp = kdplan.VehicleParams()
    x = np.zeros(12)
    assert np.max(np.abs(kdplan.f_continuous(x, vp.hover(), vp))) < 1e-12
    x1 = kdplan.rk4_step(x, np.zeros(4), 0.1, vp)
    assert x1[5] < 0


def test_mission_from_yaml():
    text = (SCENARIOS / "mission_empty.yaml").read_text()
    log = json.loads(kdplan.run_mission_yaml(text))
    assert log["outcome"] == "goal_reached"
    assert log["replans"] == 0
    again = kdplan.run_mission_yaml(text)
    assert json.loads(again) == log


def test_benchmark_small():
    yaml = kdplan.default_scenario_yaml()
    csv, summary = kdplan.run_benchmark_yaml(yaml, 2)
    lines = csv.strip().splitlines()
    assert lines[0].startswith("world,planner,success")
    assert len(lines) == 1 + 3 * 2
    assert "planners" in json.loads(summary)
