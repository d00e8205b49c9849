"""Asynchronous LiDAR-camera 3D multi-object tracker."""

import json

from ._asyncmot import (
    Box2D,
    Box3D,
    NumericalError,
    OrderingError,
    Scene,
    Tracks,
    ValidationError,
    bev_iou,
    check_config,
    default_config,
    fuse_scores,
    iou_2d,
    run_scene,
    simulate,
    solve_assignment,
    update_score_async,
    update_score_sync,
)
from ._asyncmot import evaluate as _evaluate

__all__ = [
    "Box2D",
    "Box3D",
    "NumericalError",
    "OrderingError",
    "Scene",
    "Tracks",
    "ValidationError",
    "bev_iou",
    "check_config",
    "default_config",
    "evaluate",
    "fuse_scores",
    "iou_2d",
    "run_scene",
    "simulate",
    "solve_assignment",
    "update_score_async",
    "update_score_sync",
]


def evaluate(tracks, scene, dist_thresh=2.0, n_thresholds=40):
    """Returns the evaluation report as a dict."""
    return json.loads(_evaluate(tracks, scene, dist_thresh, n_thresholds))
