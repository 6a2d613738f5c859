"""Kinematic car driving a double-lane-change path at constant speed.

The road runs along the virtual-world travel axis (-y in the FI frame so the
virtual z coordinate grows); the lane offset is a C1 piecewise-smoothstep
profile in the FI x direction: straight approach, shift by ``lane_width``
over ``transition_length``, hold, shift back, straight exit.

Positions are arc-length parameterized, so the speed along the path equals
the configured speed profile to within table-interpolation error (~1e-9).
The speed profile is constant, with an optional step change (``boost``) used
by the high-speed scenario.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

# Arc-length table density per transition segment.  The table is linearly
# interpolated, so the speed error goes as (grid step) * (integrand slope);
# this density keeps |d position/dt| within ~3e-7 of the configured speed.
_TABLE_POINTS = 262145


@dataclass(frozen=True)
class PathConfig:
    speed: float = 10.0
    lane_width: float = 3.5
    approach_length: float = 100.0
    transition_length: float = 25.0
    hold_length: float = 25.0
    # Lane shift sign along FI x. -1 shifts toward the drone's default side.
    shift_sign: float = -1.0
    chassis_height: float = 0.0
    wheelbase: float = 2.6
    # Speed multiplier applied from boost_time onward (1.0 = disabled).
    boost_factor: float = 1.0
    boost_time: float = 0.0

    def __post_init__(self):
        if self.speed <= 0.0:
            raise ValueError("speed must be positive")
        for name in ("lane_width", "approach_length", "transition_length", "hold_length"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")
        if self.boost_factor < 1.0:
            raise ValueError("boost_factor must be >= 1")


@dataclass(frozen=True)
class CarState:
    position: np.ndarray  # FI frame
    heading: float  # rad, angle of the velocity from the travel axis
    speed: float
    steering_angle: float  # diagnostic only


def _smoothstep(x: float) -> float:
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    return x * x * (3.0 - 2.0 * x)


def _smoothstep_d(x: float) -> float:
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return 6.0 * x * (1.0 - x)


def _smoothstep_dd(x: float) -> float:
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return 6.0 - 12.0 * x


class CarPath:
    """Arc-length parameterized double-lane-change path."""

    def __init__(self, config: PathConfig):
        self.config = config
        c = config
        self._s0 = c.approach_length
        self._s1 = self._s0 + c.transition_length
        self._s2 = self._s1 + c.hold_length
        self._s3 = self._s2 + c.transition_length
        # Extra arc length accumulated across one transition segment, tabulated
        # against the longitudinal coordinate (same for both transitions).
        sigma = np.linspace(0.0, c.transition_length, _TABLE_POINTS)
        slope = (c.lane_width / c.transition_length) * np.array(
            [_smoothstep_d(x / c.transition_length) for x in sigma]
        )
        integrand = np.sqrt(1.0 + slope * slope) - 1.0
        extra = np.zeros_like(sigma)
        extra[1:] = np.cumsum(0.5 * (integrand[1:] + integrand[:-1]) * np.diff(sigma))
        self._sigma_grid = sigma
        self._extra = extra
        self._extra_total = float(extra[-1])

    # -- longitudinal coordinate <-> arc length ------------------------------

    def _extra_at(self, sigma_local: float) -> float:
        return float(np.interp(sigma_local, self._sigma_grid, self._extra))

    def _arc_from_sigma(self, sigma: float) -> float:
        s = sigma
        if sigma > self._s0:
            s += self._extra_at(min(sigma, self._s1) - self._s0)
        if sigma > self._s2:
            s += self._extra_at(min(sigma, self._s3) - self._s2)
        return s

    def _sigma_from_arc(self, s: float) -> float:
        sigma = s
        for _ in range(4):  # contraction; extra' <= a few percent
            sigma = s - (self._arc_from_sigma(sigma) - sigma)
        return sigma

    # -- lane offset profile --------------------------------------------------

    def _offset(self, sigma: float) -> tuple[float, float, float]:
        """(offset, d offset/d sigma, d2 offset/d sigma2) at longitudinal sigma."""
        c = self.config
        T = c.transition_length
        amp = c.shift_sign * c.lane_width
        if sigma < self._s0 or sigma >= self._s3:
            return 0.0, 0.0, 0.0
        if sigma < self._s1:
            x = (sigma - self._s0) / T
            return amp * _smoothstep(x), amp * _smoothstep_d(x) / T, amp * _smoothstep_dd(x) / T**2
        if sigma < self._s2:
            return amp, 0.0, 0.0
        x = (sigma - self._s2) / T
        return (
            amp * (1.0 - _smoothstep(x)),
            -amp * _smoothstep_d(x) / T,
            -amp * _smoothstep_dd(x) / T**2,
        )

    # -- speed profile ---------------------------------------------------------

    def speed_at(self, t: float) -> float:
        c = self.config
        if c.boost_factor > 1.0 and t >= c.boost_time:
            return c.speed * c.boost_factor
        return c.speed

    def arc_at(self, t: float) -> float:
        c = self.config
        if c.boost_factor > 1.0 and t > c.boost_time:
            return c.speed * c.boost_time + c.speed * c.boost_factor * (t - c.boost_time)
        return c.speed * t

    def state_at(self, t: float) -> CarState:
        if t < 0.0:
            raise ValueError("t must be non-negative")
        c = self.config
        sigma = self._sigma_from_arc(self.arc_at(t))
        offset, slope, curve_num = self._offset(sigma)
        # Travel axis is -y in FI so the virtual-world z coordinate increases.
        position = np.array([offset, -sigma, c.chassis_height])
        heading = math.atan(slope)
        curvature = curve_num / (1.0 + slope * slope) ** 1.5
        steering = math.atan(c.wheelbase * curvature)
        return CarState(position, heading, self.speed_at(t), steering)

    def velocity_at(self, t: float) -> np.ndarray:
        """FI velocity vector; magnitude equals speed_at(t)."""
        sigma = self._sigma_from_arc(self.arc_at(t))
        _, slope, _ = self._offset(sigma)
        norm = math.sqrt(1.0 + slope * slope)
        v = self.speed_at(t)
        return np.array([v * slope / norm, -v / norm, 0.0])


@lru_cache(maxsize=8)
def _cached_path(config: PathConfig) -> CarPath:
    return CarPath(config)


def car_path(t: float, config: PathConfig) -> CarState:
    """Car state at time ``t`` for the given path configuration."""
    return _cached_path(config).state_at(t)
