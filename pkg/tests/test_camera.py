import math

import numpy as np
import pytest

from carchase.camera import (
    CameraIntrinsics,
    MountConfig,
    camera_pose_from_drone,
    look_at,
    project,
    spherical_acquisition_poses,
    spiral_acquisition_poses,
)

INTR = CameraIntrinsics(focal_px=150.0)


def test_intrinsics_validation():
    with pytest.raises(ValueError):
        CameraIntrinsics(focal_px=-1.0)
    with pytest.raises(ValueError):
        CameraIntrinsics(cu=700.0)


def test_project_optical_axis():
    pose = camera_pose_from_drone((0.0, 0.0, 0.0), (0.0, 0.0, 5.0))
    uv = project([10.0, 0.0, 5.0], INTR, pose)
    assert uv == pytest.approx((INTR.cu, INTR.cv), abs=1e-12)


def test_project_lateral_offset():
    pose = camera_pose_from_drone((0.0, 0.0, 0.0), (0.0, 0.0, 5.0))
    d, k = 10.0, 0.25
    # body +x is forward; -y is image right
    uv = project([d, -d * k, 5.0], INTR, pose)
    assert uv[0] == pytest.approx(INTR.cu + INTR.focal_px * k, abs=1e-9)
    assert uv[1] == pytest.approx(INTR.cv, abs=1e-9)
    below = project([d, 0.0, 5.0 - d * k], INTR, pose)
    assert below[1] == pytest.approx(INTR.cv + INTR.focal_px * k, abs=1e-9)


def test_project_behind_returns_none():
    pose = camera_pose_from_drone((0.0, 0.0, 0.0), (0.0, 0.0, 5.0))
    assert project([-1.0, 0.0, 5.0], INTR, pose) is None
    assert project([0.05, 0.0, 5.0], INTR, pose) is None  # inside z_near


def test_yawed_drone_rotates_view():
    pose = camera_pose_from_drone((0.0, 0.0, math.pi / 2), (0.0, 0.0, 5.0))
    uv = project([0.0, 10.0, 5.0], INTR, pose)  # point along +y = new forward
    assert uv == pytest.approx((INTR.cu, INTR.cv), abs=1e-9)


def test_mount_pitch_tilts_view_down():
    pitch = 0.2
    pose = camera_pose_from_drone((0.0, 0.0, 0.0), (0.0, 0.0, 5.0), MountConfig(pitch=pitch))
    # a point straight ahead now lands above the principal point
    uv = project([10.0, 0.0, 5.0], INTR, pose)
    assert uv[1] == pytest.approx(INTR.cv - INTR.focal_px * math.tan(pitch), abs=1e-9)
    # a point on the depressed axis is centered
    down = project([10.0, 0.0, 5.0 - 10.0 * math.tan(pitch)], INTR, pose)
    assert down[1] == pytest.approx(INTR.cv, abs=1e-6)


def test_rolled_drone_tilts_projected_horizon():
    # geometric oracle: very distant ground points land on the horizon line,
    # and an eye-in-hand roll rotates that line by -roll in the image
    for roll in (0.2, -0.35):
        pose = camera_pose_from_drone((roll, 0.0, 0.0), (0.0, 0.0, 5.0))
        left = project([1e7, 5e6, 0.0], INTR, pose)
        right = project([1e7, -5e6, 0.0], INTR, pose)
        angle = math.atan2(right[1] - left[1], right[0] - left[0])
        assert abs(angle + roll) < math.radians(0.5)


def test_mount_offset_moves_camera():
    mount = MountConfig(offset_body=(0.5, 0.0, -0.1))
    pose = camera_pose_from_drone((0.0, 0.0, 0.0), (1.0, 2.0, 3.0), mount)
    assert np.allclose(pose.position, [1.5, 2.0, 2.9])


def test_look_at_centers_target():
    pose = look_at([0.0, 0.0, 10.0], [5.0, 3.0, 0.0])
    uv = project([5.0, 3.0, 0.0], INTR, pose)
    assert uv == pytest.approx((INTR.cu, INTR.cv), abs=1e-9)


def test_look_at_straight_down_is_deterministic():
    p1 = look_at([0.0, 0.0, 10.0], [0.0, 0.0, 0.0])
    p2 = look_at([0.0, 0.0, 10.0], [0.0, 0.0, 0.0])
    assert np.array_equal(p1.rotation, p2.rotation)
    uv = project([0.0, 0.0, 0.0], INTR, p1)
    assert uv == pytest.approx((INTR.cu, INTR.cv), abs=1e-9)


def test_sphere_pose_examples():
    r = 15.0
    # beta = 0: directly above the target
    top = spherical_acquisition_poses(r, 1, 1)[0]
    assert np.allclose(top.position_fvr, [0.0, r, 0.0], atol=1e-12)
    # alpha = 0, beta = pi/2: on the equator along +z
    poses = spherical_acquisition_poses(r, 4, 2)
    eq = [p for p in poses if p.beta == pytest.approx(math.pi / 2) and p.alpha == 0.0][0]
    assert np.allclose(eq.position_fvr, [0.0, 0.0, r], atol=1e-12)


def test_sphere_grid_counts_and_radius():
    r = 15.0
    target = np.array([1.0, 2.0, 3.0])
    poses = spherical_acquisition_poses(r, 8, 4, target)
    assert len(poses) == 32
    for p in poses:
        assert abs(np.linalg.norm(p.position_fvr - target) - r) < 1e-12


def test_sphere_poses_look_at_target():
    target = np.array([0.0, 0.75, 0.0])
    for pose in spherical_acquisition_poses(15.0, 6, 3, target):
        cam = pose.camera_pose()
        from carchase.geometry import fvr_to_fi

        uv = project(fvr_to_fi(target), INTR, cam)
        assert uv == pytest.approx((INTR.cu, INTR.cv), abs=1e-6)


def test_spiral_poses_on_sphere():
    poses = spiral_acquisition_poses(15.0, 40, turns=3.0)
    assert len(poses) == 40
    for p in poses:
        assert abs(np.linalg.norm(p.position_fvr) - 15.0) < 1e-12
    assert poses[0].beta == 0.0
    assert poses[-1].beta == pytest.approx(math.pi / 2)


def test_pose_validation():
    with pytest.raises(ValueError):
        spherical_acquisition_poses(0.0, 4, 4)
    with pytest.raises(ValueError):
        spherical_acquisition_poses(15.0, 0, 4)
