import math

import numpy as np
import pytest

from carchase.camera import CameraIntrinsics, camera_pose_from_drone
from carchase.render import CAR_RED, DISTRACTOR_YELLOW, SceneModel, car_box, render
from carchase.vision.boxes import BoundingBox
from carchase.vision.detector import ColorBlobDetector, DetectorConfig, detect, distance_vector
from carchase.vision.segmentation import BlobCriteria
from helpers import projected_corner_box

INTR = CameraIntrinsics(focal_px=150.0)
POSE = camera_pose_from_drone((0.0, 0.0, -math.pi / 2), (0.0, 15.0, 3.0))


def test_detect_single_car_matches_projection_oracle():
    scene = SceneModel(boxes=(car_box((0.0, 0.0, 0.0), 0.0),))
    frame = render(scene, INTR, POSE)
    boxes = detect(frame)
    assert len(boxes) == 1
    oracle = projected_corner_box(scene.boxes[0], INTR, POSE)
    assert boxes[0].iou(oracle) >= 0.8


def test_detect_empty_scene():
    frame = render(SceneModel(), INTR, POSE)
    assert detect(frame) == []


def test_detect_ignores_distractor():
    scene = SceneModel(
        boxes=(
            car_box((0.0, 0.0, 0.0), 0.0),
            car_box((4.0, 6.0, 0.0), 0.0, color=DISTRACTOR_YELLOW),
        )
    )
    frame = render(scene, INTR, POSE)
    # the yellow box is visible in the frame ...
    assert (frame == np.array(DISTRACTOR_YELLOW, np.uint8)).all(axis=2).any()
    boxes = detect(frame)
    # ... yet only the red car is detected
    assert len(boxes) == 1
    oracle = projected_corner_box(scene.boxes[0], INTR, POSE)
    assert boxes[0].iou(oracle) >= 0.8


def test_detect_channel_selection():
    frame = np.zeros((20, 20, 3), dtype=np.uint8)
    frame[5:10, 5:10] = (10, 200, 10)
    assert detect(frame, DetectorConfig(channel="red")) == []
    green = detect(frame, DetectorConfig(channel="green", criteria=BlobCriteria(min_area=4.0)))
    assert len(green) == 1


def test_detector_config_validation():
    with pytest.raises(ValueError):
        DetectorConfig(channel="magenta")


def test_detector_callable_interface():
    det = ColorBlobDetector()
    frame = render(SceneModel(boxes=(car_box((0.0, 0.0, 0.0), 0.0),)), INTR, POSE)
    assert det(frame) == detect(frame)


def test_distance_vector_centered_box():
    err = distance_vector(BoundingBox(320.0, 240.0, 40.0, 20.0), 640, 480)
    assert (err.e_u, err.e_v, err.area_bb) == (0.0, 0.0, 800.0)


def test_distance_vector_worked_example():
    err = distance_vector(BoundingBox(300.0, 250.0, 40.0, 20.0), 640, 480)
    assert (err.e_u, err.e_v, err.area_bb) == (20.0, -10.0, 800.0)


def test_distance_vector_of_fused_box_matches_union_geometry():
    from carchase.vision.boxes import fuse_boxes

    boxes = [BoundingBox(100.0, 80.0, 20.0, 10.0), BoundingBox(150.0, 120.0, 30.0, 16.0)]
    fused = fuse_boxes(boxes, "maximum")
    err = distance_vector(fused, 640, 480)
    left = min(b.left for b in boxes)
    right = max(b.right for b in boxes)
    top = min(b.top for b in boxes)
    bottom = max(b.bottom for b in boxes)
    assert err.e_u == 320.0 - (left + right) / 2.0
    assert err.e_v == 240.0 - (top + bottom) / 2.0
    assert err.area_bb == (right - left) * (bottom - top)


def test_distance_vector_bounded_for_in_image_boxes():
    rng = np.random.default_rng(1)
    for _ in range(100):
        w, h = rng.uniform(1, 100, size=2)
        u = rng.uniform(w / 2, 640 - w / 2)
        v = rng.uniform(h / 2, 480 - h / 2)
        err = distance_vector(BoundingBox(u, v, w, h), 640, 480)
        assert abs(err.e_u) <= 640 and abs(err.e_v) <= 480
