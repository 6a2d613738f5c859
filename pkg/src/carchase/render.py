"""Deterministic software renderer for the synthetic scene.

The scene is a flat ground plane (z = 0 in FI), a sky, and axis-aligned
colored boxes (optionally yawed about the vertical).  Rendering ray-casts
every pixel: a pixel ray either escapes to the sky, hits the ground plane,
or hits a box face; the nearest hit wins (depth buffering).  Flat shading,
no anti-aliasing, bit-identical output for identical inputs.

Frames are (height, width, 3) uint8 arrays, row-major RGB.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np

from .camera import CameraIntrinsics, CameraPose, Z_NEAR

DEFAULT_SKY = (170, 200, 230)
DEFAULT_GROUND = (150, 150, 150)
CAR_RED = (200, 25, 25)
DISTRACTOR_YELLOW = (230, 200, 30)
CAR_SIZE = (4.2, 1.8, 1.5)  # length, width, height in meters


class IoError(OSError):
    """Frame file could not be written or parsed."""


@dataclass(frozen=True)
class SceneBox:
    center: tuple[float, float, float]
    size: tuple[float, float, float]
    color: tuple[int, int, int]
    heading: float = 0.0  # yaw about FI z

    def __post_init__(self):
        if min(self.size) <= 0.0:
            raise ValueError("box dimensions must be positive")

    def corners(self) -> np.ndarray:
        """8 corner points in FI, shape (8, 3)."""
        hx, hy, hz = (s / 2.0 for s in self.size)
        local = np.array(
            [[sx * hx, sy * hy, sz * hz] for sx in (-1, 1) for sy in (-1, 1) for sz in (-1, 1)]
        )
        c, s = math.cos(self.heading), math.sin(self.heading)
        rot = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
        return local @ rot.T + np.asarray(self.center, dtype=float)


@dataclass(frozen=True)
class SceneModel:
    boxes: tuple[SceneBox, ...] = ()
    ground_color: tuple[int, int, int] = DEFAULT_GROUND
    sky_color: tuple[int, int, int] = DEFAULT_SKY


def car_box(position, heading: float = 0.0, color=CAR_RED, size=CAR_SIZE) -> SceneBox:
    """Car-sized box resting on the ground at the given chassis position.

    ``heading`` is measured from the travel axis (-y in FI); the box's long
    side is aligned with the direction of travel.
    """
    position = np.asarray(position, dtype=float)
    length, width, height = size
    center = (float(position[0]), float(position[1]), float(position[2]) + height / 2.0)
    # Box local x is its length; travel along -y means a -90 deg base yaw.
    yaw = -math.pi / 2.0 + heading
    return SceneBox(center, (length, width, height), tuple(color), yaw)


def _pixel_ray_axes(intrinsics: CameraIntrinsics):
    """Per-column X and per-row Y ray components in camera coordinates (Zc=1)."""
    us = (np.arange(intrinsics.width) + 0.5 - intrinsics.cu) / intrinsics.focal_px
    vs = (np.arange(intrinsics.height) + 0.5 - intrinsics.cv) / intrinsics.focal_px
    return us, vs


def render(scene: SceneModel, intrinsics: CameraIntrinsics, pose: CameraPose) -> np.ndarray:
    """Rasterize the scene from the camera pose into an RGB frame."""
    h, w = intrinsics.height, intrinsics.width
    us, vs = _pixel_ray_axes(intrinsics)
    R = pose.rotation
    cam_z = float(pose.position[2])

    frame = np.empty((h, w, 3), dtype=np.uint8)
    frame[:] = np.asarray(scene.sky_color, dtype=np.uint8)

    # The world z-component of a pixel ray is affine in the pixel grid, so the
    # horizon is a straight line and each row splits into one sky and one
    # ground interval.  Rays only reach the plane from above (cam_z > 0).
    if cam_z > 0.0:
        ground_color = np.asarray(scene.ground_color, dtype=np.uint8)
        dz_col0 = R[2, 0] * us[0] + R[2, 1] * vs + R[2, 2]
        slope = R[2, 0] * (us[1] - us[0]) if w > 1 else 0.0
        if slope == 0.0:
            frame[dz_col0 < 0.0] = ground_color
        else:
            crossing = -dz_col0 / slope
            if slope < 0.0:  # ground on the right of the crossing
                starts = np.clip(np.floor(crossing).astype(np.int64) + 1, 0, w)
                for r in range(h):
                    frame[r, starts[r] :] = ground_color
            else:
                ends = np.clip(np.ceil(crossing).astype(np.int64), 0, w)
                for r in range(h):
                    frame[r, : ends[r]] = ground_color

    if scene.boxes:
        depth = np.full((h, w), np.inf)
        for box in scene.boxes:
            _cast_box(box, intrinsics, pose, us, vs, cam_z, frame, depth)
    return frame


def _box_pixel_rect(box: SceneBox, intrinsics: CameraIntrinsics, pose: CameraPose):
    """Conservative pixel-rect covering the box, or None when fully behind."""
    pc = (box.corners() - pose.position) @ pose.rotation
    if np.all(pc[:, 2] <= Z_NEAR):
        return None
    if np.any(pc[:, 2] <= Z_NEAR):
        return (0, intrinsics.height, 0, intrinsics.width)
    u = intrinsics.cu + intrinsics.focal_px * pc[:, 0] / pc[:, 2]
    v = intrinsics.cv + intrinsics.focal_px * pc[:, 1] / pc[:, 2]
    r0 = max(0, int(math.floor(v.min())) - 1)
    r1 = min(intrinsics.height, int(math.ceil(v.max())) + 2)
    c0 = max(0, int(math.floor(u.min())) - 1)
    c1 = min(intrinsics.width, int(math.ceil(u.max())) + 2)
    if r0 >= r1 or c0 >= c1:
        return None
    return (r0, r1, c0, c1)


def _cast_box(box, intrinsics, pose, us, vs, cam_z, frame, depth):
    rect = _box_pixel_rect(box, intrinsics, pose)
    if rect is None:
        return
    r0, r1, c0, c1 = rect
    R = pose.rotation
    # Ray directions over the sub-rectangle, rotated into the box frame.
    x = us[c0:c1][None, :]
    y = vs[r0:r1][:, None]
    ch, sh = math.cos(box.heading), math.sin(box.heading)
    to_box = np.array([[ch, sh, 0.0], [-sh, ch, 0.0], [0.0, 0.0, 1.0]])
    M = to_box @ R
    origin = to_box @ (pose.position - np.asarray(box.center, dtype=float))

    t_enter = np.full((r1 - r0, c1 - c0), -np.inf)
    t_exit = np.full((r1 - r0, c1 - c0), np.inf)
    valid = np.ones((r1 - r0, c1 - c0), dtype=bool)
    for axis in range(3):
        d = M[axis, 0] * x + M[axis, 1] * y + M[axis, 2]
        half = box.size[axis] / 2.0
        o = origin[axis]
        with np.errstate(divide="ignore", invalid="ignore"):
            tl = (-half - o) / d
            th = (half - o) / d
        near = np.minimum(tl, th)
        far = np.maximum(tl, th)
        parallel = d == 0.0
        if np.any(parallel):
            inside = abs(o) <= half
            near = np.where(parallel, -np.inf if inside else np.inf, near)
            far = np.where(parallel, np.inf if inside else -np.inf, far)
            if not inside:
                valid &= ~parallel
        t_enter = np.maximum(t_enter, near)
        t_exit = np.minimum(t_exit, far)

    hit = valid & (t_enter <= t_exit) & (t_enter > Z_NEAR)
    if not np.any(hit):
        return
    # Depth test against the ground plane and previously cast boxes.
    occluder = depth[r0:r1, c0:c1]
    if cam_z > 0.0:
        dz = R[2, 0] * x + R[2, 1] * y + R[2, 2]
        with np.errstate(divide="ignore", invalid="ignore"):
            t_ground = np.where(dz < 0.0, -cam_z / dz, np.inf)
        occluder = np.minimum(occluder, t_ground)
    closer = hit & (t_enter < occluder)
    depth[r0:r1, c0:c1][closer] = t_enter[closer]
    frame[r0:r1, c0:c1][closer] = np.asarray(box.color, dtype=np.uint8)


# -- PPM (P6) frame export ----------------------------------------------------


def ppm_bytes(frame: np.ndarray) -> bytes:
    frame = np.ascontiguousarray(frame, dtype=np.uint8)
    h, w = frame.shape[0], frame.shape[1]
    return b"P6\n%d %d\n255\n" % (w, h) + frame.tobytes()


def write_ppm(path, frame: np.ndarray) -> None:
    try:
        with open(path, "wb") as fh:
            fh.write(ppm_bytes(frame))
    except OSError as exc:
        raise IoError(f"cannot write frame to {path}: {exc}") from exc


def read_ppm(path) -> np.ndarray:
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise IoError(f"cannot read frame from {path}: {exc}") from exc
    m = re.match(rb"P6\s+(\d+)\s+(\d+)\s+255\s", data)
    if not m:
        raise IoError(f"{path}: not a binary P6 file")
    w, h = int(m.group(1)), int(m.group(2))
    pixels = np.frombuffer(data[m.end() :], dtype=np.uint8)
    if pixels.size != 3 * w * h:
        raise IoError(f"{path}: pixel payload has {pixels.size} bytes, expected {3 * w * h}")
    return pixels.reshape(h, w, 3).copy()
