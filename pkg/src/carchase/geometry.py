"""Rotation representations and world-frame conversions.

Two fixed frames are used throughout:

* ``FI``  -- classic inertial frame, z-axis up.
* ``FVR`` -- virtual-world frame, y-axis up, centered on the car's
  initial center of gravity.

The axis correspondence is a signed permutation::

    (x, y, z)_FVR = (x_FI, z_FI, -y_FI)

Euler angles follow the ZYX convention: ``R = Rz(yaw) @ Ry(pitch) @ Rx(roll)``
maps body coordinates into the inertial frame.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

ORTHONORMALITY_TOL = 1e-12
GIMBAL_LOCK_TOL = 1e-9
UNIT_AXIS_TOL = 1e-9


class GimbalLockError(ValueError):
    """Pitch is at +/-90 deg; roll and yaw are not separable."""


class NonUnitAxisError(ValueError):
    """Rotation axis does not have unit length."""


class FrameMixError(ValueError):
    """Arithmetic attempted between vectors tagged with different frames."""


class EulerAngles(NamedTuple):
    roll: float
    pitch: float
    yaw: float


class FrameTag(enum.Enum):
    FI = "FI"
    FVR = "FVR"


@dataclass(frozen=True)
class TaggedPoint:
    """Position vector carrying its frame tag.

    Addition/subtraction is only defined between points in the same frame;
    ``convert`` (below) is the only operation that changes the tag.
    """

    v: np.ndarray
    tag: FrameTag

    def __post_init__(self):
        object.__setattr__(self, "v", np.asarray(self.v, dtype=float))
        if self.v.shape != (3,):
            raise ValueError(f"expected a 3-vector, got shape {self.v.shape}")

    def _check(self, other: "TaggedPoint") -> None:
        if self.tag is not other.tag:
            raise FrameMixError(f"cannot mix {self.tag.value} and {other.tag.value} vectors")

    def __add__(self, other: "TaggedPoint") -> "TaggedPoint":
        self._check(other)
        return TaggedPoint(self.v + other.v, self.tag)

    def __sub__(self, other: "TaggedPoint") -> "TaggedPoint":
        self._check(other)
        return TaggedPoint(self.v - other.v, self.tag)


def euler_to_dcm(eta) -> np.ndarray:
    """Body-to-inertial rotation matrix for ZYX Euler angles.

    ``eta`` is (roll, pitch, yaw) in radians; pitch must lie inside
    (-pi/2, pi/2) for the conversion to be invertible.
    """
    phi, theta, psi = (float(a) for a in eta)
    for a in (phi, theta, psi):
        if not math.isfinite(a):
            raise ValueError("euler angles must be finite")
    cphi, sphi = math.cos(phi), math.sin(phi)
    cth, sth = math.cos(theta), math.sin(theta)
    cpsi, spsi = math.cos(psi), math.sin(psi)
    return np.array(
        [
            [cpsi * cth, cpsi * sth * sphi - spsi * cphi, cpsi * sth * cphi + spsi * sphi],
            [spsi * cth, spsi * sth * sphi + cpsi * cphi, spsi * sth * cphi - cpsi * sphi],
            [-sth, cth * sphi, cth * cphi],
        ]
    )


def dcm_to_euler(R) -> EulerAngles:
    """Inverse of :func:`euler_to_dcm`.

    Raises :class:`GimbalLockError` when ``|R[2,0]| >= 1 - 1e-9``, i.e. the
    pitch is within numerical reach of +/-90 deg.
    """
    R = np.asarray(R, dtype=float)
    if abs(R[2, 0]) >= 1.0 - GIMBAL_LOCK_TOL:
        raise GimbalLockError(f"pitch at singularity: R[2,0] = {R[2, 0]:+.12f}")
    theta = math.asin(-R[2, 0])
    phi = math.atan2(R[2, 1], R[2, 2])
    psi = math.atan2(R[1, 0], R[0, 0])
    return EulerAngles(phi, theta, psi)


def rodrigues(axis, angle: float) -> np.ndarray:
    """Rotation matrix for a rotation of ``angle`` radians about a unit axis."""
    axis = np.asarray(axis, dtype=float)
    n = float(np.linalg.norm(axis))
    if abs(n - 1.0) > UNIT_AXIS_TOL:
        raise NonUnitAxisError(f"axis norm is {n:.12f}, expected 1")
    kx, ky, kz = axis
    K = np.array([[0.0, -kz, ky], [kz, 0.0, -kx], [-ky, kx, 0.0]])
    return np.eye(3) + math.sin(angle) * K + (1.0 - math.cos(angle)) * (K @ K)


_ZERO3 = np.zeros(3)


def fi_to_fvr(p, origin_fvr=_ZERO3) -> np.ndarray:
    """Map an FI position into the virtual-world frame.

    ``origin_fvr`` is the FVR origin expressed in FI coordinates (the car's
    initial center of gravity by default convention).
    """
    q = np.asarray(p, dtype=float) - np.asarray(origin_fvr, dtype=float)
    return np.array([q[0], q[2], -q[1]])


def fvr_to_fi(p, origin_fvr=_ZERO3) -> np.ndarray:
    """Exact inverse of :func:`fi_to_fvr`."""
    p = np.asarray(p, dtype=float)
    q = np.array([p[0], -p[2], p[1]])
    return q + np.asarray(origin_fvr, dtype=float)


def convert(point: TaggedPoint, to: FrameTag, origin_fvr=_ZERO3) -> TaggedPoint:
    """Re-express a tagged position in the requested frame."""
    if point.tag is to:
        return point
    if to is FrameTag.FVR:
        return TaggedPoint(fi_to_fvr(point.v, origin_fvr), FrameTag.FVR)
    return TaggedPoint(fvr_to_fi(point.v, origin_fvr), FrameTag.FI)


def is_rotation(R, tol: float = ORTHONORMALITY_TOL) -> bool:
    """True when R is orthonormal with unit determinant, within ``tol``."""
    R = np.asarray(R, dtype=float)
    return (
        R.shape == (3, 3)
        and np.max(np.abs(R.T @ R - np.eye(3))) <= tol
        and abs(np.linalg.det(R) - 1.0) <= tol
    )
