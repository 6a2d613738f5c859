import math

import numpy as np
import pytest

from carchase.dynamics import (
    ControlCommand,
    DroneParams,
    DroneState,
    InfeasibleCommandError,
    NonFiniteStateError,
    RotorSpeeds,
    mixer_forward,
    mixer_inverse,
    quad_derivatives,
    step,
    step_n,
)

P = DroneParams()


def test_params_reject_nonpositive():
    with pytest.raises(ValueError):
        DroneParams(mass=0.0)


def test_mixer_forward_equal_speeds():
    cmd = mixer_forward(RotorSpeeds(1000.0, 1000.0, 1000.0, 1000.0), P)
    assert cmd.thrust == pytest.approx(3.0, abs=1e-12)
    assert cmd.torque_roll == 0.0
    assert cmd.torque_pitch == 0.0
    assert cmd.torque_yaw == 0.0


def test_mixer_forward_zero():
    cmd = mixer_forward(RotorSpeeds(0.0, 0.0, 0.0, 0.0), P)
    assert (cmd.thrust, cmd.torque_roll, cmd.torque_pitch, cmd.torque_yaw) == (0, 0, 0, 0)


def test_hover_speed_oracle():
    # independent arithmetic: omega_h = sqrt(m g / (4 bf))
    omega_h = math.sqrt(P.mass * P.gravity / (4.0 * P.thrust_factor))
    assert P.hover_rotor_speed == pytest.approx(omega_h, abs=1e-12)
    cmd = mixer_forward(RotorSpeeds(omega_h, omega_h, omega_h, omega_h), P)
    assert cmd.thrust == pytest.approx(P.mass * P.gravity, abs=1e-9)
    # the rounded figure 1457.96 rad/s lands within a mN of hover thrust
    near = mixer_forward(RotorSpeeds(1457.96, 1457.96, 1457.96, 1457.96), P)
    assert near.thrust == pytest.approx(6.3765, abs=1e-3)


def test_mixer_inverse_pure_thrust():
    spd = mixer_inverse(ControlCommand(3.0), P)
    assert np.allclose(spd.as_tuple(), 1000.0, atol=1e-9)
    zero = mixer_inverse(ControlCommand(0.0), P)
    assert zero.as_tuple() == (0.0, 0.0, 0.0, 0.0)


def test_mixer_round_trip_random_feasible():
    rng = np.random.default_rng(5)
    for _ in range(1000):
        speeds = RotorSpeeds(*rng.uniform(100.0, 1500.0, size=4))
        cmd = mixer_forward(speeds, P)
        back = mixer_inverse(cmd, P)
        again = mixer_forward(back, P)
        assert abs(again.thrust - cmd.thrust) < 1e-9
        assert abs(again.torque_roll - cmd.torque_roll) < 1e-9
        assert abs(again.torque_pitch - cmd.torque_pitch) < 1e-9
        assert abs(again.torque_yaw - cmd.torque_yaw) < 1e-9
        assert np.allclose(back.as_tuple(), speeds.as_tuple(), atol=1e-6)


def test_mixer_inverse_infeasible_reports_rotor():
    # huge roll torque at tiny thrust drives rotor 2 negative
    with pytest.raises(InfeasibleCommandError) as e:
        mixer_inverse(ControlCommand(0.1, torque_roll=1.0), P)
    assert e.value.rotor in (1, 2, 3, 4)
    clamped = mixer_inverse(ControlCommand(0.1, torque_roll=1.0), P, clamp=True)
    assert min(clamped.as_tuple()) == 0.0


def test_mixer_inverse_saturation():
    with pytest.raises(InfeasibleCommandError):
        mixer_inverse(ControlCommand(20.0), P)  # above 4*bf*omega_max^2 = 12 N


def test_derivatives_hover_equilibrium():
    state = DroneState()
    d = quad_derivatives(state, ControlCommand(P.hover_thrust), P)
    assert np.allclose(d, 0.0, atol=1e-12)


def test_derivatives_free_fall():
    d = quad_derivatives(DroneState(), ControlCommand(0.0), P)
    assert d[3] == 0.0 and d[4] == 0.0
    assert d[5] == pytest.approx(-P.gravity, abs=0.0)


def test_derivatives_pitched_thrust():
    state = DroneState(attitude=np.array([0.0, math.pi / 6, 0.0]))
    d = quad_derivatives(state, ControlCommand(P.hover_thrust), P)
    assert d[3] == pytest.approx(P.gravity * math.sin(math.pi / 6), abs=1e-12)  # 4.905
    assert d[5] == pytest.approx(P.gravity * (math.cos(math.pi / 6) - 1.0), abs=1e-12)


def test_derivatives_gyroscopic_terms():
    state = DroneState(rates=np.array([0.3, -0.4, 0.5]))
    d = quad_derivatives(state, ControlCommand(P.hover_thrust), P)
    assert d[9] == pytest.approx((-0.4 * 0.5) * (P.inertia_y - P.inertia_z) / P.inertia_x)
    assert d[10] == pytest.approx((0.3 * 0.5) * (P.inertia_z - P.inertia_x) / P.inertia_y)
    assert d[11] == pytest.approx((0.3 * -0.4) * (P.inertia_x - P.inertia_y) / P.inertia_z)


def test_derivatives_jacobian_is_smooth():
    # central finite differences at two step sizes agree: no kinks in the model
    state = DroneState(
        position=np.array([1.0, -2.0, 3.0]),
        velocity=np.array([0.5, 0.2, -0.4]),
        attitude=np.array([0.1, -0.2, 0.3]),
        rates=np.array([0.2, 0.1, -0.3]),
    )
    cmd = ControlCommand(5.0, 0.01, -0.02, 0.005)

    def jac(h):
        y0 = state.as_vector()
        J = np.zeros((12, 12))
        for j in range(12):
            e = np.zeros(12)
            e[j] = h
            dp = quad_derivatives(DroneState.from_vector(y0 + e), cmd, P)
            dm = quad_derivatives(DroneState.from_vector(y0 - e), cmd, P)
            J[:, j] = (dp - dm) / (2 * h)
        return J

    j1, j2 = jac(1e-5), jac(1e-6)
    scale = np.abs(j1).max()
    assert np.max(np.abs(j1 - j2)) / scale < 1e-4


def test_step_hover_is_stationary():
    state = DroneState(position=np.array([1.0, 2.0, 3.0]))
    out = step(state, ControlCommand(P.hover_thrust), P, 1e-3)
    assert np.max(np.abs(out.as_vector() - state.as_vector())) < 1e-12


def test_step_free_fall_matches_analytic():
    out = step_n(DroneState(), ControlCommand(0.0), P, 1e-3, 1000)
    assert out.position[2] == pytest.approx(-0.5 * P.gravity, abs=1e-6)
    assert out.velocity[2] == pytest.approx(-P.gravity, abs=1e-9)


def test_step_convergence_order():
    # Richardson estimate on a tumbling trajectory; RK4 should show order >= 3.5
    cmd = ControlCommand(P.hover_thrust * 1.1, 5e-3, -8e-3, 2e-3)
    start = DroneState(rates=np.array([1.5, -1.0, 2.0]), attitude=np.array([0.2, 0.1, -0.3]))

    def endpoint(dt):
        return step_n(start, cmd, P, dt, round(0.5 / dt)).as_vector()

    e1 = np.linalg.norm(endpoint(4e-3) - endpoint(2e-3))
    e2 = np.linalg.norm(endpoint(2e-3) - endpoint(1e-3))
    order = math.log2(e1 / e2)
    assert order > 3.5


def test_step_is_deterministic():
    cmd = ControlCommand(6.0, 1e-3, -1e-3, 1e-4)
    s1 = step_n(DroneState(), cmd, P, 1e-3, 500)
    s2 = step_n(DroneState(), cmd, P, 1e-3, 500)
    assert np.array_equal(s1.as_vector(), s2.as_vector())


def test_step_rejects_bad_dt_and_nonfinite():
    with pytest.raises(ValueError):
        step(DroneState(), ControlCommand(1.0), P, 0.0)
    bad = DroneState(velocity=np.array([math.inf, 0.0, 0.0]))
    with pytest.raises(NonFiniteStateError):
        step(bad, ControlCommand(1.0), P, 1e-3)


def test_command_rejects_negative_thrust():
    with pytest.raises(ValueError):
        ControlCommand(-1.0)


def test_hover_equilibrium_long_run():
    state = DroneState()
    out = step_n(state, ControlCommand(P.hover_thrust), P, 1e-3, 10_000)
    assert np.max(np.abs(out.position)) < 1e-9
