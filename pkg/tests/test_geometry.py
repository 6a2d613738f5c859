import math

import numpy as np
import pytest

from carchase.geometry import (
    EulerAngles,
    FrameMixError,
    FrameTag,
    GimbalLockError,
    NonUnitAxisError,
    TaggedPoint,
    convert,
    dcm_to_euler,
    euler_to_dcm,
    fi_to_fvr,
    fvr_to_fi,
    is_rotation,
    rodrigues,
)


def test_euler_identity():
    assert np.allclose(euler_to_dcm((0.0, 0.0, 0.0)), np.eye(3), atol=0.0)


def test_euler_pure_yaw_maps_x_to_y():
    R = euler_to_dcm((0.0, 0.0, math.pi / 2))
    assert np.allclose(R @ [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], atol=1e-15)


def test_random_eulers_give_orthonormal_unit_det():
    rng = np.random.default_rng(7)
    for _ in range(300):
        eta = rng.uniform([-math.pi, -1.5, -math.pi], [math.pi, 1.5, math.pi])
        R = euler_to_dcm(eta)
        assert np.max(np.abs(R.T @ R - np.eye(3))) < 1e-12
        assert abs(np.linalg.det(R) - 1.0) < 1e-12
        assert is_rotation(R)


def test_dcm_euler_round_trip():
    eta = EulerAngles(0.1, 0.2, 0.3)
    back = dcm_to_euler(euler_to_dcm(eta))
    assert np.allclose(back, eta, atol=1e-12)


def test_dcm_to_euler_identity():
    assert np.allclose(dcm_to_euler(np.eye(3)), (0.0, 0.0, 0.0), atol=0.0)


def test_gimbal_lock_raises():
    R = euler_to_dcm((0.0, math.pi / 2 - 1e-12, 0.0))
    with pytest.raises(GimbalLockError):
        dcm_to_euler(R)


def test_rodrigues_zero_angle_identity():
    assert np.allclose(rodrigues([0.0, 1.0, 0.0], 0.0), np.eye(3), atol=0.0)


def test_rodrigues_half_turn_about_z():
    R = rodrigues([0.0, 0.0, 1.0], math.pi)
    assert np.allclose(R, np.diag([-1.0, -1.0, 1.0]), atol=1e-15)


def test_rodrigues_matches_euler_single_axis():
    rng = np.random.default_rng(3)
    for _ in range(50):
        a = rng.uniform(-math.pi, math.pi)
        assert np.max(np.abs(rodrigues([0, 0, 1], a) - euler_to_dcm((0, 0, a)))) < 1e-12
        assert np.max(np.abs(rodrigues([1, 0, 0], a) - euler_to_dcm((a, 0, 0)))) < 1e-12
        assert np.max(np.abs(rodrigues([0, 1, 0], a) - euler_to_dcm((0, a, 0)))) < 1e-12


def test_rodrigues_rejects_non_unit_axis():
    with pytest.raises(NonUnitAxisError):
        rodrigues([0.0, 0.0, 2.0], 0.5)


def test_frame_map_examples():
    assert np.allclose(fi_to_fvr([0.0, 0.0, 0.0]), [0.0, 0.0, 0.0], atol=0.0)
    assert np.allclose(fi_to_fvr([1.0, 2.0, 3.0]), [1.0, 3.0, -2.0], atol=0.0)
    assert np.allclose(fvr_to_fi([1.0, 3.0, -2.0]), [1.0, 2.0, 3.0], atol=0.0)


def test_frame_map_round_trip_and_norm():
    rng = np.random.default_rng(11)
    for _ in range(1000):
        p = rng.uniform(-100, 100, size=3)
        assert np.max(np.abs(fvr_to_fi(fi_to_fvr(p)) - p)) < 1e-12
        assert abs(np.linalg.norm(fi_to_fvr(p)) - np.linalg.norm(p)) < 1e-12
    origin = rng.uniform(-10, 10, size=3)
    p = rng.uniform(-100, 100, size=3)
    assert np.max(np.abs(fvr_to_fi(fi_to_fvr(p, origin), origin) - p)) < 1e-12


def test_tagged_points_refuse_mixed_frames():
    a = TaggedPoint([1.0, 0.0, 0.0], FrameTag.FI)
    b = TaggedPoint([0.0, 1.0, 0.0], FrameTag.FVR)
    with pytest.raises(FrameMixError):
        a + b
    same = a + TaggedPoint([1.0, 1.0, 1.0], FrameTag.FI)
    assert same.tag is FrameTag.FI
    assert np.allclose(same.v, [2.0, 1.0, 1.0])


def test_convert_changes_tag_and_round_trips():
    p = TaggedPoint([3.0, -2.0, 5.0], FrameTag.FI)
    q = convert(p, FrameTag.FVR)
    assert q.tag is FrameTag.FVR
    back = convert(q, FrameTag.FI)
    assert np.allclose(back.v, p.v, atol=1e-15)
