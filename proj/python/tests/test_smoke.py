import json
import math

import pytest

import asyncmot


def test_assignment_prefers_lower_total_cost():
    assert asyncmot.solve_assignment([[1.0, 2.0], [2.0, 10.0]]) == [(0, 1), (1, 0)]
    assert asyncmot.solve_assignment([[math.inf, 1.0], [1.0, math.inf]]) == [(0, 1), (1, 0)]
    # Gating applies after the optimal assignment, not before it.
    assert asyncmot.solve_assignment([[1.0, 2.0], [2.0, 10.0]], gate=1.5) == []
    assert asyncmot.solve_assignment([[1.0, 2.0], [2.0, 10.0]], gate=2.0) == [(0, 1), (1, 0)]
    assert asyncmot.solve_assignment([]) == []


def test_geometry():
    a = asyncmot.Box3D(0, 0, 0.8, 2, 4, 1.6)
    b = asyncmot.Box3D(1, 0, 0.8, 2, 4, 1.6)
    assert asyncmot.bev_iou(a, a) == pytest.approx(1.0)
    # Shifted 1 m along its 4 m length: overlap 3 x 2 over a union of 10.
    assert asyncmot.bev_iou(a, b) == pytest.approx(0.6)
    assert asyncmot.iou_2d(asyncmot.Box2D(0, 0, 2, 2), asyncmot.Box2D(1, 0, 3, 2)) == pytest.approx(1 / 3)


def test_scores():
    assert asyncmot.fuse_scores(0.9, 0.5, 0.4) == pytest.approx(0.4 * 0.9 + 0.6 * 0.5)
    assert asyncmot.update_score_sync(0.5, 0.5) == pytest.approx(0.75)
    assert asyncmot.update_score_async(0.5, 0.8, 0.5) == pytest.approx(0.7)


def test_simulate_track_evaluate():
    scene = asyncmot.simulate(seed=1)
    assert len(scene) > 0 and scene.has_ground_truth
    tracks = asyncmot.run_scene(scene)
    assert len(tracks) > 0
    ids = [t["id"] for t in tracks[len(tracks) - 1]["tracks"]]
    assert ids == sorted(set(ids))
    report = asyncmot.evaluate(tracks, scene)
    assert 0.5 < report["amota"] <= 1.0

    again = asyncmot.Scene.from_jsonl(scene.to_jsonl())
    assert again.to_jsonl() == scene.to_jsonl()
    assert asyncmot.run_scene(again).to_jsonl() == tracks.to_jsonl()


def test_config_round_trip_and_errors():
    cfg = json.loads(asyncmot.default_config())
    cfg["use_async"] = False
    text = asyncmot.check_config(json.dumps(cfg))
    assert json.loads(text)["use_async"] is False
    scene = asyncmot.simulate(seed=2)
    asyncmot.run_scene(scene, text)

    del cfg["defaults"]["noise"]["gamma"]
    with pytest.raises(asyncmot.ValidationError, match="defaults.noise.gamma"):
        asyncmot.check_config(json.dumps(cfg))
    with pytest.raises(ValueError):
        asyncmot.Scene.from_jsonl("{not json\n")
