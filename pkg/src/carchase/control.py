"""Two-stage flight controller working in the virtual frame.

Stage 1, the reference generator, turns the image-space errors into position
and attitude references through a cascade of PI/PID loops::

    psi_r = PI(e_u)            z_r = z_init + PID(psi_r - psi_ref_r)
    theta_r = PI(e_v)          y_r = y_init + PI(theta_r - theta_ref_r)
                               x_r = x_init + PI(area_ref - area_bb)

Stage 2 converts the position errors e_x = x_r - x_d and e_z = z_r - z_d into
tilt references via the integral-backstepping law and closes PD loops on
attitude and altitude to produce the thrust/torque command.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .dynamics import ControlCommand

U_T_MIN = 0.1
MAX_TILT = 0.5


class ThrustTooLowError(ValueError):
    """Tilt references are undefined for (near-)zero thrust."""


# -- discrete PID -------------------------------------------------------------


@dataclass(frozen=True)
class PidGains:
    kp: float = 0.0
    ki: float = 0.0
    kd: float = 0.0

    def __post_init__(self):
        if self.ki < 0.0 or self.kd < 0.0:
            raise ValueError("integral and derivative gains must be non-negative")


@dataclass(frozen=True)
class PidState:
    """Integrator (forward Euler, clamped) and previous error for the derivative.

    The previous error starts at zero, so a nonzero first sample produces a
    derivative kick of e/dt; loops in this controller all start at zero error.
    """

    integral: float = 0.0
    prev_error: float = 0.0
    clamp: float = math.inf  # symmetric bound on the integral

    def with_integral(self, value: float) -> "PidState":
        return replace(self, integral=min(max(value, -self.clamp), self.clamp))


def pid_step(state: PidState, gains: PidGains, error: float, dt: float) -> tuple[PidState, float]:
    """One discrete PID update; the integral includes the current sample."""
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    new = state.with_integral(state.integral + error * dt)
    derivative = (error - state.prev_error) / dt
    out = gains.kp * error + gains.ki * new.integral + gains.kd * derivative
    return replace(new, prev_error=error), out


# -- reference generator -------------------------------------------------------


@dataclass(frozen=True)
class ReferenceGains:
    psi_r: PidGains = PidGains(kp=1e-5, ki=1e-3)
    theta_r: PidGains = PidGains(kp=1e-5, ki=1e-3)
    x_r: PidGains = PidGains(kp=1e-6, ki=6e-6)
    y_r: PidGains = PidGains(kp=1e-2, ki=1e-2)
    z_r: PidGains = PidGains(kp=15.0, ki=57.5, kd=3.75)


@dataclass(frozen=True)
class ReferenceSet:
    """Generated references, virtual frame (x standoff, y up, z travel)."""

    x_r: float
    y_r: float
    z_r: float
    psi_r: float = 0.0
    theta_r: float = 0.0
    psi_ref_r: float = 0.0
    theta_ref_r: float = 0.0
    area_ref: float = 0.0


@dataclass
class ReferenceBanks:
    """PID states of the five reference loops, plus the initial-pose offsets."""

    x_init: float = 0.0
    y_init: float = 0.0
    z_init: float = 0.0
    psi_init: float = 0.0
    psi: PidState = field(default_factory=lambda: PidState(clamp=1000.0))
    theta: PidState = field(default_factory=lambda: PidState(clamp=1000.0))
    x: PidState = field(default_factory=lambda: PidState(clamp=5e6))
    y: PidState = field(default_factory=lambda: PidState(clamp=2000.0))
    z: PidState = field(default_factory=lambda: PidState(clamp=50.0))


def reference_step(
    e_u: float,
    e_v: float,
    area_bb: float,
    refs: ReferenceSet,
    banks: ReferenceBanks,
    gains: ReferenceGains,
    dt: float,
    z_input_sign: float = 1.0,
) -> ReferenceSet:
    """Advance the reference cascade by one frame tick (mutates ``banks``).

    ``z_input_sign`` sets the orientation of the travel-axis loop: the lateral
    PID consumes ``z_input_sign * (psi_r - psi_ref_r)``.  +1 feeds the yaw
    reference straight through; the closed loop wires -1 to match the
    virtual-world travel-axis orientation (see the harness configuration).
    """
    banks.psi, psi_out = pid_step(banks.psi, gains.psi_r, e_u, dt)
    psi_r = banks.psi_init + psi_out

    banks.z, z_out = pid_step(banks.z, gains.z_r, z_input_sign * (psi_r - refs.psi_ref_r), dt)
    z_r = banks.z_init + z_out

    banks.theta, theta_r = pid_step(banks.theta, gains.theta_r, e_v, dt)

    banks.y, y_out = pid_step(banks.y, gains.y_r, theta_r - refs.theta_ref_r, dt)
    y_r = banks.y_init + y_out

    banks.x, x_out = pid_step(banks.x, gains.x_r, refs.area_ref - area_bb, dt)
    x_r = banks.x_init + x_out

    return replace(refs, x_r=x_r, y_r=y_r, z_r=z_r, psi_r=psi_r, theta_r=theta_r)


# -- integral backstepping -------------------------------------------------------


@dataclass(frozen=True)
class IbGains:
    c1: float = 2.0
    c2: float = 0.5
    c3: float = 2.0
    c4: float = 0.5
    lambda1: float = 0.025
    lambda2: float = 0.025

    def __post_init__(self):
        for name in ("c1", "c2", "c3", "c4", "lambda1", "lambda2"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class IbState:
    int_ex: float = 0.0
    int_ez: float = 0.0
    prev_ex: float | None = None
    prev_ez: float | None = None
    int_clamp: float = 50.0


def ib_attitude_refs(
    e_x: float,
    e_z: float,
    state: IbState,
    gains: IbGains,
    u_t: float,
    mass: float,
    dt: float,
    max_tilt: float = MAX_TILT,
    u_t_min: float = U_T_MIN,
) -> tuple[float, float, IbState]:
    """Tilt references (theta_ref, phi_ref) from the position errors.

    The integrals hold history up to the previous step (the current sample is
    accumulated after evaluation); derivatives are backward differences that
    start at zero.  Outputs are clamped to ``+/- max_tilt``.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    if u_t <= u_t_min:
        raise ThrustTooLowError(f"u_T = {u_t:.4f} N is at or below the {u_t_min} N floor")

    dex = 0.0 if state.prev_ex is None else (e_x - state.prev_ex) / dt
    dez = 0.0 if state.prev_ez is None else (e_z - state.prev_ez) / dt

    ex_ib = gains.lambda1 * state.int_ex + gains.c1 * e_x + dex
    ez_ib = gains.lambda2 * state.int_ez + gains.c3 * e_z + dez

    scale = mass / u_t
    theta_ref = scale * (
        (1.0 - gains.c1**2 + gains.lambda1) * e_x
        + (gains.c1 + gains.c2) * ex_ib
        - gains.c1 * gains.lambda1 * state.int_ex
    )
    phi_ref = -scale * (
        (1.0 - gains.c3**2 + gains.lambda2) * e_z
        + (gains.c3 + gains.c4) * ez_ib
        - gains.c3 * gains.lambda2 * state.int_ez
    )

    bound = state.int_clamp
    new_state = replace(
        state,
        int_ex=min(max(state.int_ex + e_x * dt, -bound), bound),
        int_ez=min(max(state.int_ez + e_z * dt, -bound), bound),
        prev_ex=e_x,
        prev_ez=e_z,
    )
    theta_ref = min(max(theta_ref, -max_tilt), max_tilt)
    phi_ref = min(max(phi_ref, -max_tilt), max_tilt)
    return theta_ref, phi_ref, new_state


# -- attitude / thrust loops ----------------------------------------------------


@dataclass(frozen=True)
class AttitudeGains:
    theta: PidGains = PidGains(kp=12.0, kd=4.0)
    phi: PidGains = PidGains(kp=8.0, kd=4.0)
    psi: PidGains = PidGains(kp=10.0, kd=4.0)
    y: PidGains = PidGains(kp=1000.0, kd=200.0)


def attitude_command_step(
    theta_ref: float,
    phi_ref: float,
    psi_ref: float,
    y_ref: float,
    theta_d: float,
    phi_d: float,
    psi_d: float,
    y_d: float,
    theta_rate: float,
    phi_rate: float,
    psi_rate: float,
    y_rate: float,
    gains: AttitudeGains,
    feedforward: float,
) -> ControlCommand:
    """Rate-damped PD loops on attitude and altitude.

    The derivative acts on the measured rates (u = kp*e - kd*rate), so
    reference steps at the vision rate do not kick the torques; thrust gets
    the hover feedforward and is clamped non-negative.  These gains place the
    closed-loop poles well above the camera rate, so this loop is meant to
    run at the physics step.
    """
    u_theta = gains.theta.kp * (theta_ref - theta_d) - gains.theta.kd * theta_rate
    u_phi = gains.phi.kp * (phi_ref - phi_d) - gains.phi.kd * phi_rate
    u_psi = gains.psi.kp * (psi_ref - psi_d) - gains.psi.kd * psi_rate
    u_y = gains.y.kp * (y_ref - y_d) - gains.y.kd * y_rate
    return ControlCommand(max(0.0, u_y + feedforward), u_phi, u_theta, u_psi)
