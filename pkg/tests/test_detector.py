from __future__ import annotations

import numpy as np
import pytest

from graspcell.perception import DetectorParams, detect
from graspcell.scene.types import GroundTruthEntry

from .oracles import iou


def _gt(object_id: int, label: str, box, occlusion: float = 0.0,
        degenerate: bool = False) -> GroundTruthEntry:
    return GroundTruthEntry(object_id=object_id, class_label=label, box=box,
                            occlusion=occlusion, degenerate=degenerate)


NO_MISS = ((0.0, 0.0), (0.999, 0.0), (1.0, 1.0))


def test_empty_gt_gives_empty_detections():
    params = DetectorParams()
    assert detect([], params, frame_seed=0) == []


def test_fully_occluded_never_detected():
    params = DetectorParams()
    gt = [_gt(1, "dog", None, occlusion=1.0, degenerate=True)]
    for fs in range(50):
        assert detect(gt, params, frame_seed=fs) == []


def test_zero_jitter_zero_miss_reproduces_boxes():
    params = DetectorParams(miss_curve=NO_MISS, jitter_sigma=0.0)
    gt = [_gt(1, "dog", (10.0, 10.0, 40.0, 30.0)), _gt(2, "hammer", (100.0, 50.0, 160.0, 80.0))]
    dets = detect(gt, params, frame_seed=1)
    assert len(dets) == 2
    assert dets[0].box.as_tuple() == (10.0, 10.0, 40.0, 30.0)
    assert dets[1].class_label == "hammer"


def test_deterministic_per_seed_pair():
    params = DetectorParams(seed=5)
    gt = [_gt(i, "dog", (10.0 * i, 10.0, 10.0 * i + 30.0, 40.0), occlusion=0.2)
          for i in range(1, 6)]
    a = detect(gt, params, frame_seed=9)
    b = detect(gt, params, frame_seed=9)
    assert [d.box.as_tuple() for d in a] == [d.box.as_tuple() for d in b]
    c = detect(gt, params, frame_seed=10)
    assert [d.box.as_tuple() for d in a] != [d.box.as_tuple() for d in c]


def test_same_class_merge_iou_above_threshold():
    # IoU computed by hand: A=(0,0,10,10), B=(0,2.5,10,12.5):
    # intersection 10 x 7.5 = 75, union 125, IoU = 0.6 > 0.5 -> merged union
    a = (0.0, 0.0, 10.0, 10.0)
    b = (0.0, 2.5, 10.0, 12.5)
    assert iou(a, b) == pytest.approx(0.6)
    params = DetectorParams(miss_curve=NO_MISS, jitter_sigma=0.0, merge_iou_threshold=0.5)
    gt = [_gt(1, "dog", a), _gt(2, "dog", b)]
    dets = detect(gt, params, frame_seed=0)
    assert len(dets) == 1
    assert dets[0].box.as_tuple() == (0.0, 0.0, 10.0, 12.5)
    assert dets[0].merged_count == 2


def test_same_boxes_different_class_not_merged():
    a = (0.0, 0.0, 10.0, 10.0)
    b = (0.0, 2.5, 10.0, 12.5)
    params = DetectorParams(miss_curve=NO_MISS, jitter_sigma=0.0, merge_iou_threshold=0.5)
    gt = [_gt(1, "dog", a), _gt(2, "hammer", b)]
    assert len(detect(gt, params, frame_seed=0)) == 2


def test_iou_below_threshold_not_merged():
    a = (0.0, 0.0, 10.0, 10.0)
    b = (0.0, 6.0, 10.0, 16.0)  # IoU = 40/160 = 0.25
    assert iou(a, b) == pytest.approx(0.25)
    params = DetectorParams(miss_curve=NO_MISS, jitter_sigma=0.0, merge_iou_threshold=0.5)
    gt = [_gt(1, "dog", a), _gt(2, "dog", b)]
    assert len(detect(gt, params, frame_seed=0)) == 2


def test_merged_confidence_is_max_of_members():
    params = DetectorParams(miss_curve=NO_MISS, jitter_sigma=0.0, merge_iou_threshold=0.3)
    gt = [_gt(1, "dog", (0.0, 0.0, 10.0, 10.0), occlusion=0.0),
          _gt(2, "dog", (0.0, 2.0, 10.0, 12.0), occlusion=0.4)]
    dets = detect(gt, params, frame_seed=0)
    assert len(dets) == 1
    assert dets[0].confidence == pytest.approx(0.99, abs=1e-9)


def test_miss_rate_follows_curve():
    params = DetectorParams(miss_curve=((0.0, 0.0), (0.5, 0.5), (1.0, 1.0)), jitter_sigma=0.0)
    gt = [_gt(1, "dog", (10.0, 10.0, 40.0, 40.0), occlusion=0.5)]
    hits = sum(bool(detect(gt, params, frame_seed=fs)) for fs in range(2000))
    assert 0.45 <= hits / 2000 <= 0.55


def test_boxes_clamped_to_frame():
    params = DetectorParams(miss_curve=NO_MISS, jitter_sigma=30.0, seed=2)
    gt = [_gt(1, "dog", (2.0, 2.0, 30.0, 30.0))]
    for fs in range(100):
        for det in detect(gt, params, frame_seed=fs, frame_size=(64, 48)):
            b = det.box
            assert 0 <= b.u_min < b.u_max <= 64
            assert 0 <= b.v_min < b.v_max <= 48


def test_invalid_miss_curve_rejected():
    with pytest.raises(ValueError):
        DetectorParams(miss_curve=((0.0, 0.5), (1.0, 0.2)))
    with pytest.raises(ValueError):
        DetectorParams(miss_curve=((0.0, 0.0), (1.0, 0.9)))
