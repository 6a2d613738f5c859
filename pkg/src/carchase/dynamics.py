"""Quadrotor rigid-body plant: rotor mixing, equations of motion, RK4 stepping.

The model is the standard plus-configuration quadrotor near hover: Euler-angle
rates are identified with body rates and the rotational equations keep the
gyroscopic cross terms.  Translational accelerations come from tilting the
total thrust vector against gravity::

    m*ax = uT*(c_phi*s_th*c_psi + s_phi*s_psi)
    m*ay = uT*(c_phi*s_th*s_psi - s_phi*c_psi)
    m*az = uT*c_th*c_phi - m*g

Rotor mixing (plus configuration, rotors 1/3 on the body x arms, 2/4 on y):

    uT     = bf*(O1^2 + O2^2 + O3^2 + O4^2)
    u_phi  = bf*l*(O4^2 - O2^2)
    u_theta= bf*l*(O3^2 - O1^2)
    u_psi  = (bf/bm)*(-O1^2 + O2^2 - O3^2 + O4^2)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

DEFAULT_GRAVITY = 9.81
DEFAULT_OMEGA_MAX = 2000.0


class NonFiniteStateError(ArithmeticError):
    """Integration produced a non-finite state component."""


class InfeasibleCommandError(ValueError):
    """Command cannot be realized by any rotor speeds within bounds."""

    def __init__(self, msg: str, rotor: int):
        super().__init__(msg)
        self.rotor = rotor


@dataclass(frozen=True)
class DroneParams:
    """Physical constants of the vehicle (SI units)."""

    mass: float = 0.65
    arm_length: float = 0.23
    thrust_factor: float = 7.5e-7
    drag_factor: float = 3.13e-5
    inertia_x: float = 7.5e-3
    inertia_y: float = 7.5e-3
    inertia_z: float = 1.3e-3
    gravity: float = DEFAULT_GRAVITY
    omega_max: float = DEFAULT_OMEGA_MAX

    def __post_init__(self):
        for name in (
            "mass",
            "arm_length",
            "thrust_factor",
            "drag_factor",
            "inertia_x",
            "inertia_y",
            "inertia_z",
            "gravity",
            "omega_max",
        ):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be strictly positive")

    @property
    def hover_thrust(self) -> float:
        return self.mass * self.gravity

    @property
    def hover_rotor_speed(self) -> float:
        return math.sqrt(self.hover_thrust / (4.0 * self.thrust_factor))


@dataclass
class DroneState:
    """12-state rigid body in the FI frame.

    position/velocity are m and m/s, attitude is (roll, pitch, yaw) in rad,
    rates are body angular rates in rad/s.
    """

    position: np.ndarray = field(default_factory=lambda: np.zeros(3))
    velocity: np.ndarray = field(default_factory=lambda: np.zeros(3))
    attitude: np.ndarray = field(default_factory=lambda: np.zeros(3))
    rates: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        self.position = np.asarray(self.position, dtype=float)
        self.velocity = np.asarray(self.velocity, dtype=float)
        self.attitude = np.asarray(self.attitude, dtype=float)
        self.rates = np.asarray(self.rates, dtype=float)

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.position, self.velocity, self.attitude, self.rates])

    @classmethod
    def from_vector(cls, y) -> "DroneState":
        y = np.asarray(y, dtype=float)
        return cls(y[0:3].copy(), y[3:6].copy(), y[6:9].copy(), y[9:12].copy())

    def pitch_in_range(self, margin: float = 0.0) -> bool:
        return abs(float(self.attitude[1])) < math.pi / 2.0 - margin


@dataclass(frozen=True)
class ControlCommand:
    """Total thrust (N) plus roll/pitch/yaw torques (N*m)."""

    thrust: float
    torque_roll: float = 0.0
    torque_pitch: float = 0.0
    torque_yaw: float = 0.0

    def __post_init__(self):
        if self.thrust < 0.0:
            raise ValueError("thrust must be non-negative")


@dataclass(frozen=True)
class RotorSpeeds:
    """Angular velocities of the four rotors, rad/s."""

    omega1: float
    omega2: float
    omega3: float
    omega4: float

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.omega1, self.omega2, self.omega3, self.omega4)


def mixer_forward(omega: RotorSpeeds, params: DroneParams) -> ControlCommand:
    """Map rotor speeds to thrust and torques."""
    s1, s2, s3, s4 = (w * w for w in omega.as_tuple())
    bf = params.thrust_factor
    thrust = bf * (s1 + s2 + s3 + s4)
    u_phi = bf * params.arm_length * (s4 - s2)
    u_theta = bf * params.arm_length * (s3 - s1)
    u_psi = (bf / params.drag_factor) * (-s1 + s2 - s3 + s4)
    return ControlCommand(thrust, u_phi, u_theta, u_psi)


def mixer_inverse(cmd: ControlCommand, params: DroneParams, clamp: bool = False) -> RotorSpeeds:
    """Rotor speeds realizing a command; exact right inverse of mixer_forward.

    Raises :class:`InfeasibleCommandError` when a rotor would need a negative
    squared speed or exceed ``omega_max``, unless ``clamp`` is set, in which
    case squared speeds are clamped into the feasible interval.
    """
    bf = params.thrust_factor
    total = cmd.thrust / bf
    a = cmd.torque_roll / (bf * params.arm_length)
    b = cmd.torque_pitch / (bf * params.arm_length)
    c = cmd.torque_yaw * params.drag_factor / bf
    odd = 0.5 * (total - c)  # s1 + s3
    even = 0.5 * (total + c)  # s2 + s4
    squares = [
        0.5 * (odd - b),
        0.5 * (even - a),
        0.5 * (odd + b),
        0.5 * (even + a),
    ]
    max_sq = params.omega_max**2
    out = []
    for i, s in enumerate(squares):
        if clamp:
            s = min(max(s, 0.0), max_sq)
        elif s < 0.0:
            raise InfeasibleCommandError(f"rotor {i + 1} needs negative squared speed {s:.6g}", i + 1)
        elif s > max_sq:
            raise InfeasibleCommandError(f"rotor {i + 1} saturates: {math.sqrt(s):.6g} rad/s", i + 1)
        out.append(math.sqrt(s))
    return RotorSpeeds(*out)


def _derivatives(y, thrust, u_phi, u_theta, u_psi, p: DroneParams):
    """Time derivative of the flat 12-state; scalar math for speed."""
    vx, vy, vz = y[3], y[4], y[5]
    phi, theta, psi = y[6], y[7], y[8]
    wx, wy, wz = y[9], y[10], y[11]

    cphi, sphi = math.cos(phi), math.sin(phi)
    cth, sth = math.cos(theta), math.sin(theta)
    cpsi, spsi = math.cos(psi), math.sin(psi)

    inv_m = 1.0 / p.mass
    ax = thrust * (cphi * sth * cpsi + sphi * spsi) * inv_m
    ay = thrust * (cphi * sth * spsi - sphi * cpsi) * inv_m
    az = thrust * cth * cphi * inv_m - p.gravity

    dwx = (wy * wz * (p.inertia_y - p.inertia_z) + u_phi) / p.inertia_x
    dwy = (wx * wz * (p.inertia_z - p.inertia_x) + u_theta) / p.inertia_y
    dwz = (wx * wy * (p.inertia_x - p.inertia_y) + u_psi) / p.inertia_z

    return (vx, vy, vz, ax, ay, az, wx, wy, wz, dwx, dwy, dwz)


def quad_derivatives(state: DroneState, cmd: ControlCommand, params: DroneParams) -> np.ndarray:
    """Derivative of ``state.as_vector()`` under the given command."""
    d = _derivatives(
        tuple(state.as_vector()),
        cmd.thrust,
        cmd.torque_roll,
        cmd.torque_pitch,
        cmd.torque_yaw,
        params,
    )
    return np.array(d)


def _rk4(y, thrust, u_phi, u_theta, u_psi, p: DroneParams, dt: float):
    k1 = _derivatives(y, thrust, u_phi, u_theta, u_psi, p)
    h2 = 0.5 * dt
    y2 = tuple(y[i] + h2 * k1[i] for i in range(12))
    k2 = _derivatives(y2, thrust, u_phi, u_theta, u_psi, p)
    y3 = tuple(y[i] + h2 * k2[i] for i in range(12))
    k3 = _derivatives(y3, thrust, u_phi, u_theta, u_psi, p)
    y4 = tuple(y[i] + dt * k3[i] for i in range(12))
    k4 = _derivatives(y4, thrust, u_phi, u_theta, u_psi, p)
    sixth = dt / 6.0
    return tuple(y[i] + sixth * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]) for i in range(12))


def step(state: DroneState, cmd: ControlCommand, params: DroneParams, dt: float) -> DroneState:
    """Advance the state by one RK4 step of duration ``dt`` (zero-order-hold command)."""
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    y = _rk4(
        tuple(state.as_vector()),
        cmd.thrust,
        cmd.torque_roll,
        cmd.torque_pitch,
        cmd.torque_yaw,
        params,
        dt,
    )
    for v in y:
        if not math.isfinite(v):
            raise NonFiniteStateError("non-finite state after integration step")
    return DroneState.from_vector(y)


def step_n(state: DroneState, cmd: ControlCommand, params: DroneParams, dt: float, n: int) -> DroneState:
    """``n`` consecutive RK4 steps with the command held constant."""
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    y = tuple(state.as_vector())
    args = (cmd.thrust, cmd.torque_roll, cmd.torque_pitch, cmd.torque_yaw, params, dt)
    for _ in range(n):
        y = _rk4(y, *args)
    for v in y:
        if not math.isfinite(v):
            raise NonFiniteStateError("non-finite state after integration step")
    return DroneState.from_vector(y)
