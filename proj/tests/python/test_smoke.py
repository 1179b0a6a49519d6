import math

import numpy as np
import pytest

import fusetrack as ft


def test_pillarize_shape_and_mean():
    pts = np.zeros((3, ft.RADAR_CHANNELS))
    pts[:, 0] = [0.1, 0.3, 30.0]
    pts[:, 1] = [0.1, 0.5, -20.0]
    pts[:, 5] = [1.0, 3.0, 7.0]
    bev = ft.pillarize(pts)
    assert bev.shape == (ft.RADAR_CHANNELS, 128, 128)
    row, col = ft.BevGrid().world_to_cell(0.1, 0.1)
    assert bev[5, row, col] == pytest.approx(2.0)
    assert np.count_nonzero(bev[5]) == 2


def test_fusion_shapes():
    radar = np.zeros((18, 128, 128), dtype=np.float32)
    assert ft.fuse_concat(np.zeros((64, 128, 128), dtype=np.float32), radar).shape == (82, 128, 128)
    assert ft.residual_concat(np.zeros((256, 128, 128), dtype=np.float32), radar).shape == (
        274,
        128,
        128,
    )


def test_greedy_match_tie_break():
    a = np.array([[0.9, 0.9], [0.9, 0.2]])
    matches, tracks, dets = ft.greedy_match(a, 0.3)
    assert matches == [(0, 0)]
    assert tracks == [1]
    assert dets == [1]


def test_kalman_round_trip():
    d = ft.Detection()
    d.center = [1.0, 2.0, 0.0]
    d.velocity = [2.0, 0.0, 0.0]
    d.dims = [4.0, 1.8, 1.5]
    d.embedding = np.array([1.0, 0.0])
    s = ft.kf_predict(ft.kf_init(d), 0.5)
    assert s.mean[0] == pytest.approx(2.0)
    u = ft.kf_update(s, d)
    assert np.trace(u.covariance) < np.trace(s.covariance)


def test_simulate_track_evaluate():
    sc = ft.ScenarioConfig()
    sc.n_objects = 4
    sc.n_frames = 20
    sc.seed = 3
    bundle = ft.generate(sc)
    cfg = ft.TrackerConfig()
    cfg.min_hits = 1
    frames = ft.run_sequence(bundle.detections, cfg)
    assert len(frames) == 20
    result = ft.evaluate(bundle.gt_log, [frames])
    assert result.amota == pytest.approx(1.0)
    assert result.ids == 0
    assert len(result.per_recall) == 40
    assert not math.isnan(result.mave)
