"""Ideal pinhole camera rigidly mounted on the drone, plus acquisition poses.

Camera axes: +Z along the optical axis, +X to the right in the image (u),
+Y down (v).  The default mount points the optical axis along the body
forward (+x) axis; ``MountConfig.pitch`` tilts it down about the body y axis.

Projection: u = cu + f*Xc/Zc, v = cv + f*Yc/Zc, valid for Zc > z_near.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import euler_to_dcm, fvr_to_fi

Z_NEAR = 0.1

# Columns: camera X (right = -y body), Y (down = -z body), Z (forward = +x body).
_MOUNT_ALIGN = np.array(
    [
        [0.0, 0.0, 1.0],
        [-1.0, 0.0, 0.0],
        [0.0, -1.0, 0.0],
    ]
)


@dataclass(frozen=True)
class CameraIntrinsics:
    focal_px: float = 554.0
    cu: float = 320.0
    cv: float = 240.0
    width: int = 640
    height: int = 480

    def __post_init__(self):
        if self.focal_px <= 0.0:
            raise ValueError("focal length must be positive")
        if not (0.0 < self.cu < self.width and 0.0 < self.cv < self.height):
            raise ValueError("principal point must lie inside the image")

    @property
    def center(self) -> tuple[float, float]:
        return (self.width / 2.0, self.height / 2.0)


@dataclass(frozen=True)
class MountConfig:
    """Rigid camera mount relative to the drone body."""

    pitch: float = 0.0  # rad, positive tilts the optical axis down
    offset_body: tuple[float, float, float] = (0.0, 0.0, 0.0)


@dataclass(frozen=True)
class CameraPose:
    position: np.ndarray  # FI
    rotation: np.ndarray  # camera -> FI

    def __post_init__(self):
        object.__setattr__(self, "position", np.asarray(self.position, dtype=float))
        object.__setattr__(self, "rotation", np.asarray(self.rotation, dtype=float))


def mount_rotation(mount: MountConfig) -> np.ndarray:
    """Camera-to-body rotation: forward-facing alignment plus down-tilt."""
    cp, sp = math.cos(mount.pitch), math.sin(mount.pitch)
    tilt = np.array([[cp, 0.0, sp], [0.0, 1.0, 0.0], [-sp, 0.0, cp]])
    return tilt @ _MOUNT_ALIGN


def camera_pose_from_drone(attitude, position, mount: MountConfig = MountConfig()) -> CameraPose:
    """Pose of the rigidly mounted camera for a drone attitude and position."""
    body_to_fi = euler_to_dcm(attitude)
    rotation = body_to_fi @ mount_rotation(mount)
    pos = np.asarray(position, dtype=float) + body_to_fi @ np.asarray(mount.offset_body, dtype=float)
    return CameraPose(pos, rotation)


def project(point, intrinsics: CameraIntrinsics, pose: CameraPose, z_near: float = Z_NEAR):
    """Pixel coordinates of an FI point, or None when at/behind the near plane."""
    pc = pose.rotation.T @ (np.asarray(point, dtype=float) - pose.position)
    if pc[2] <= z_near:
        return None
    u = intrinsics.cu + intrinsics.focal_px * pc[0] / pc[2]
    v = intrinsics.cv + intrinsics.focal_px * pc[1] / pc[2]
    return (float(u), float(v))


def look_at(position, target, up_hint=(0.0, 0.0, 1.0)) -> CameraPose:
    """Camera pose at ``position`` with the optical axis through ``target``.

    The image 'up' follows ``up_hint`` projected off the view axis; when the
    view axis is (anti)parallel to the hint a fixed fallback keeps the result
    deterministic.
    """
    position = np.asarray(position, dtype=float)
    forward = np.asarray(target, dtype=float) - position
    n = np.linalg.norm(forward)
    if n == 0.0:
        raise ValueError("camera position coincides with target")
    forward = forward / n
    up = np.asarray(up_hint, dtype=float)
    if np.linalg.norm(np.cross(forward, up)) < 1e-9:
        up = np.array([1.0, 0.0, 0.0])
    right = np.cross(forward, up)
    right /= np.linalg.norm(right)
    down = np.cross(forward, right)
    return CameraPose(position, np.column_stack([right, down, forward]))


@dataclass(frozen=True)
class AcquisitionPose:
    """Camera pose on the radius-r sphere around the target.

    Position relative to the target, virtual frame (y up)::

        y = r*cos(beta),  x = r*sin(beta)*sin(alpha),  z = r*sin(beta)*cos(alpha)
    """

    radius: float
    alpha: float
    beta: float
    target_fvr: np.ndarray = field(default_factory=lambda: np.zeros(3))

    @property
    def position_fvr(self) -> np.ndarray:
        r, a, b = self.radius, self.alpha, self.beta
        rel = np.array([r * math.sin(b) * math.sin(a), r * math.cos(b), r * math.sin(b) * math.cos(a)])
        return np.asarray(self.target_fvr, dtype=float) + rel

    def camera_pose(self, origin_fvr=np.zeros(3)) -> CameraPose:
        pos_fi = fvr_to_fi(self.position_fvr, origin_fvr)
        target_fi = fvr_to_fi(np.asarray(self.target_fvr, dtype=float), origin_fvr)
        return look_at(pos_fi, target_fi)


def spherical_acquisition_poses(radius: float, n_alpha: int, n_beta: int, target_fvr=np.zeros(3)):
    """Uniform alpha x beta grid over [0, 2pi] x [0, pi/2] at fixed radius.

    alpha omits the duplicate 2pi endpoint; beta includes both endpoints when
    n_beta > 1.
    """
    if radius <= 0.0:
        raise ValueError("radius must be positive")
    if n_alpha < 1 or n_beta < 1:
        raise ValueError("grid counts must be >= 1")
    alphas = np.linspace(0.0, 2.0 * math.pi, n_alpha, endpoint=False)
    betas = np.linspace(0.0, math.pi / 2.0, n_beta) if n_beta > 1 else np.array([0.0])
    return [
        AcquisitionPose(radius, float(a), float(b), np.asarray(target_fvr, dtype=float))
        for b in betas
        for a in alphas
    ]


def spiral_acquisition_poses(radius: float, n_poses: int, turns: float = 4.0, target_fvr=np.zeros(3)):
    """Alternate single-parameter sweep: alpha winds ``turns`` times while beta
    descends the sphere from pole to equator."""
    if radius <= 0.0:
        raise ValueError("radius must be positive")
    if n_poses < 1:
        raise ValueError("n_poses must be >= 1")
    ts = np.linspace(0.0, 1.0, n_poses)
    return [
        AcquisitionPose(
            radius,
            float(2.0 * math.pi * turns * t % (2.0 * math.pi)),
            float(math.pi / 2.0 * t),
            np.asarray(target_fvr, dtype=float),
        )
        for t in ts
    ]
