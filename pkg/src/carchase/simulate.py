"""Closed-loop simulation driver: render -> vision -> control -> physics.

Each frame tick renders the scene from the drone's camera, runs the target
selector, turns the image errors into references, closes the backstepping
and attitude loops, and advances the rigid-body dynamics by
``frame_period / dt_physics`` RK4 substeps.  Rows are logged per tick and the
run is deterministic for a fixed configuration.

Coordinates in the log are virtual-frame (x standoff, y up, z travel).
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, replace

import numpy as np

from . import control
from .camera import camera_pose_from_drone
from .car import CarPath
from .config import SimConfig, load_config
from .dynamics import (
    ControlCommand,
    DroneState,
    InfeasibleCommandError,
    NonFiniteStateError,
    _rk4,
    mixer_inverse,
)
from .geometry import fi_to_fvr
from .render import SceneModel, car_box, render, write_ppm
from .vision.detector import ColorBlobDetector, distance_vector
from .vision.selector import SelectorMode, TargetSelector

LOG_COLUMNS = [
    "t",
    "x_d",
    "y_d",
    "z_d",
    "phi_d",
    "theta_d",
    "psi_d",
    "x_car",
    "y_car",
    "z_car",
    "e_u",
    "e_v",
    "area_bb",
    "u_T",
    "u_phi",
    "u_theta",
    "u_psi",
    "x_r",
    "y_r",
    "z_r",
    "psi_r",
    "theta_r",
    "mode",
    "confidence",
]

CONFIG_FILENAME = "config.txt"
LOG_FILENAME = "log.csv"
METRICS_FILENAME = "metrics.txt"


class SimulationAborted(RuntimeError):
    """Simulation stopped early; the partial log was written."""


@dataclass
class RunMetrics:
    frames_total: int = 0
    frames_tracked: int = 0
    loss_events: int = 0
    mean_abs_e_u: float = 0.0
    max_abs_e_u: float = 0.0
    mean_abs_e_v: float = 0.0
    max_abs_e_v: float = 0.0
    mean_standoff: float = 0.0
    max_standoff: float = 0.0
    mean_area_error: float = 0.0
    saturation_events: int = 0
    pitch_limit_events: int = 0
    aborted: bool = False

    def as_block(self) -> str:
        lines = []
        for name, value in vars(self).items():
            if isinstance(value, bool):
                value = str(value).lower()
            elif isinstance(value, float):
                value = f"{value:.9g}"
            lines.append(f"{name} = {value}")
        return "\n".join(lines) + "\n"


def _fmt(x: float) -> str:
    return f"{x:.9g}"


class Simulation:
    """Owns all mutable state of one closed-loop run."""

    def __init__(self, config: SimConfig):
        self.config = config
        self.path = CarPath(config.path)
        self.dt_frame = config.frame_period
        self.selector = TargetSelector(
            detector=ColorBlobDetector(config.detector),
            fuse_mode=config.selector.fuse_mode,
            loss_frames=config.selector.loss_frames,
            loss_threshold=config.selector.loss_threshold,
        )
        self._init_controller()
        self._init_drone()
        self.u_t_last = config.drone.hover_thrust
        self.rows: list[list] = []
        self.metrics = RunMetrics()
        self._area_err_sum = 0.0
        self._finalized = False

    # -- initialization -------------------------------------------------------

    def _init_controller(self):
        cfg = self.config
        g = cfg.reference_gains
        x0, y0, z0 = cfg.init_fvr
        yaw = cfg.init_attitude[2]

        if cfg.auto_trim:
            # Cruise trim: yaw offset that makes the travel-axis reference ramp
            # at the car speed, drone trailing so the target sits on the axis.
            psi_c = cfg.wiring.z_loop_sign * cfg.path.speed / g.z_r.ki
            yaw = psi_c
            z0 = -x0 * math.tan(psi_c) if x0 < 0.0 else z0
            z_in = cfg.wiring.z_loop_sign * psi_c
            psi_bank = control.PidState(
                integral=psi_c / g.psi_r.ki, prev_error=0.0, clamp=cfg.clamps["psi_r"]
            )
            z_bank = control.PidState(
                integral=-g.z_r.kp * z_in / g.z_r.ki, prev_error=z_in, clamp=cfg.clamps["z_r"]
            )
        else:
            psi_bank = control.PidState(clamp=cfg.clamps["psi_r"])
            z_bank = control.PidState(clamp=cfg.clamps["z_r"])

        self.trim_yaw = yaw
        self.trim_z = z0
        self.refs = control.ReferenceSet(
            x_r=x0, y_r=y0, z_r=z0, psi_r=yaw, theta_r=0.0, area_ref=cfg.area_ref
        )
        self.banks = control.ReferenceBanks(
            x_init=x0,
            y_init=y0,
            z_init=z0,
            psi_init=0.0,
            psi=psi_bank,
            theta=control.PidState(clamp=cfg.clamps["theta_r"]),
            x=control.PidState(clamp=cfg.clamps["x_r"]),
            y=control.PidState(clamp=cfg.clamps["y_r"]),
            z=z_bank,
        )
        self.ib_state = control.IbState(int_clamp=cfg.ib_int_clamp)

    def _init_drone(self):
        cfg = self.config
        x0, y0 = cfg.init_fvr[0], cfg.init_fvr[1]
        position_fi = np.array([x0, -self.trim_z, y0])
        velocity_fi = self.path.velocity_at(0.0) if cfg.auto_trim else np.zeros(3)
        roll, pitch = cfg.init_attitude[0], cfg.init_attitude[1]
        self.drone = DroneState(
            position=position_fi,
            velocity=velocity_fi,
            attitude=np.array([roll, pitch, self.trim_yaw]),
        )

    # -- scene ------------------------------------------------------------------

    def scene_at(self, t: float):
        cfg = self.config
        car = self.path.state_at(t)
        boxes = [car_box(car.position, car.heading, color=cfg.car_color)]
        if cfg.distractor_enabled:
            # parallel lane on the far side, leading the target along travel
            dx, dz = cfg.distractor_offset
            pos = np.array([dx, car.position[1] - dz, car.position[2]])
            boxes.append(car_box(pos, 0.0, color=cfg.distractor_color))
        return SceneModel(boxes=tuple(boxes)), car

    # -- one frame tick ------------------------------------------------------------

    def tick(self, index: int, frame_hook=None):
        cfg = self.config
        t = index * self.dt_frame
        scene, car = self.scene_at(t)
        pose = camera_pose_from_drone(self.drone.attitude, self.drone.position, cfg.mount)
        frame = render(scene, cfg.intrinsics, pose)
        if frame_hook is not None:
            frame_hook(index, t, frame, self.drone, car)

        mode_before = self.selector.mode
        box = self.selector.step(frame)
        if mode_before is SelectorMode.TRACK and self.selector.mode is SelectorMode.DETECT:
            self.metrics.loss_events += 1

        err = None
        if box is not None:
            err = distance_vector(box, cfg.intrinsics.width, cfg.intrinsics.height)
            if self.refs.area_ref <= 0.0:
                self.refs = replace(self.refs, area_ref=err.area_bb)
            self.refs = control.reference_step(
                err.e_u,
                err.e_v,
                err.area_bb,
                self.refs,
                self.banks,
                cfg.reference_gains,
                self.dt_frame,
                z_input_sign=cfg.wiring.z_loop_sign,
            )

        pos_fvr = fi_to_fvr(self.drone.position)
        e_x = self.refs.x_r - pos_fvr[0]
        e_z = self.refs.z_r - pos_fvr[2]
        theta_ref, phi_ref, self.ib_state = control.ib_attitude_refs(
            e_x,
            e_z,
            self.ib_state,
            cfg.ib_gains,
            self.u_t_last,
            cfg.drone.mass,
            self.dt_frame,
            max_tilt=cfg.ib_max_tilt,
            u_t_min=cfg.ib_u_t_min,
        )
        phi_ref *= cfg.wiring.phi_ref_sign

        # Inner loop: attitude/thrust PD re-evaluated every physics substep
        # against the references held for this frame.
        cmd = self._advance_physics(theta_ref, phi_ref)
        self.u_t_last = cmd.thrust

        try:
            mixer_inverse(cmd, cfg.drone)
        except InfeasibleCommandError:
            self.metrics.saturation_events += 1

        if not self.drone.pitch_in_range(margin=0.01):
            self.metrics.pitch_limit_events += 1

        self._record(t, car, err, cmd, box)
        return box

    def _advance_physics(self, theta_ref: float, phi_ref: float) -> ControlCommand:
        """Run the frame's physics substeps with the inner PD loop; returns the
        command issued at the first substep (logged as the tick's command)."""
        cfg = self.config
        g = cfg.attitude_gains
        hover = cfg.drone.hover_thrust
        psi_ref, y_ref = self.refs.psi_r, self.refs.y_r
        y = tuple(self.drone.as_vector())
        first_cmd = None
        for _ in range(cfg.substeps):
            # FVR altitude is FI z (index 2); its rate is vz (index 5).
            u_theta = g.theta.kp * (theta_ref - y[7]) - g.theta.kd * y[10]
            u_phi = g.phi.kp * (phi_ref - y[6]) - g.phi.kd * y[9]
            u_psi = g.psi.kp * (psi_ref - y[8]) - g.psi.kd * y[11]
            thrust = max(0.0, g.y.kp * (y_ref - y[2]) - g.y.kd * y[5] + hover)
            if first_cmd is None:
                first_cmd = ControlCommand(thrust, u_phi, u_theta, u_psi)
            y = _rk4(y, thrust, u_phi, u_theta, u_psi, cfg.drone, cfg.dt_physics)
        for value in y:
            if not math.isfinite(value):
                raise NonFiniteStateError("non-finite state after integration step")
        self.drone = DroneState.from_vector(y)
        return first_cmd

    def _record(self, t, car, err, cmd: ControlCommand, box):
        pos_fvr = fi_to_fvr(self.drone.position)
        car_fvr = fi_to_fvr(car.position)
        att = self.drone.attitude
        m = self.metrics
        m.frames_total += 1
        if box is not None:
            m.frames_tracked += 1
            m.mean_abs_e_u += abs(err.e_u)
            m.mean_abs_e_v += abs(err.e_v)
            m.max_abs_e_u = max(m.max_abs_e_u, abs(err.e_u))
            m.max_abs_e_v = max(m.max_abs_e_v, abs(err.e_v))
            self._area_err_sum += abs(err.area_bb - self.refs.area_ref)
        standoff = float(np.linalg.norm(self.drone.position - car.position))
        m.mean_standoff += standoff
        m.max_standoff = max(m.max_standoff, standoff)

        confidence = self.selector.tracker.confidence if self.selector.tracker else 0.0
        self.rows.append(
            [
                _fmt(t),
                _fmt(pos_fvr[0]),
                _fmt(pos_fvr[1]),
                _fmt(pos_fvr[2]),
                _fmt(att[0]),
                _fmt(att[1]),
                _fmt(att[2]),
                _fmt(car_fvr[0]),
                _fmt(car_fvr[1]),
                _fmt(car_fvr[2]),
                _fmt(err.e_u if err else math.nan),
                _fmt(err.e_v if err else math.nan),
                _fmt(err.area_bb if err else math.nan),
                _fmt(cmd.thrust),
                _fmt(cmd.torque_roll),
                _fmt(cmd.torque_pitch),
                _fmt(cmd.torque_yaw),
                _fmt(self.refs.x_r),
                _fmt(self.refs.y_r),
                _fmt(self.refs.z_r),
                _fmt(self.refs.psi_r),
                _fmt(self.refs.theta_r),
                self.selector.mode.value,
                _fmt(confidence),
            ]
        )

    def _finalize_metrics(self):
        if self._finalized:
            return
        self._finalized = True
        m = self.metrics
        if m.frames_tracked:
            m.mean_abs_e_u /= m.frames_tracked
            m.mean_abs_e_v /= m.frames_tracked
            m.mean_area_error = self._area_err_sum / m.frames_tracked
        if m.frames_total:
            m.mean_standoff /= m.frames_total

    def run(self, frame_hook=None) -> RunMetrics:
        n = self.config.n_frames
        try:
            for i in range(n):
                self.tick(i, frame_hook=frame_hook)
        except NonFiniteStateError as exc:
            self.rows.append([_fmt((len(self.rows)) * self.dt_frame)] + [_fmt(math.nan)] * 21 + ["aborted", _fmt(math.nan)])
            self.metrics.aborted = True
            self._finalize_metrics()
            raise SimulationAborted(str(exc)) from exc
        self._finalize_metrics()
        return self.metrics

    def write_log(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(",".join(LOG_COLUMNS) + "\n")
            for row in self.rows:
                fh.write(",".join(row) + "\n")


def run_simulation(config: SimConfig, out_dir=None, frame_hook=None) -> RunMetrics:
    """Run the closed loop; write config echo, CSV log and metrics to ``out_dir``.

    When ``config.frame_every`` is positive, every k-th rendered frame is also
    dumped as ``frames/frame_%06d.ppm``.
    """
    out_dir = out_dir if out_dir is not None else config.output_dir
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, CONFIG_FILENAME), "w", encoding="utf-8") as fh:
        fh.write(config.config_text())

    hooks = []
    if frame_hook is not None:
        hooks.append(frame_hook)
    if config.frame_every > 0:
        frames_dir = os.path.join(out_dir, "frames")
        os.makedirs(frames_dir, exist_ok=True)

        def dump(index, t, frame, drone, car):
            if index % config.frame_every == 0:
                write_ppm(os.path.join(frames_dir, f"frame_{index:06d}.ppm"), frame)

        hooks.append(dump)

    def combined(index, t, frame, drone, car):
        for h in hooks:
            h(index, t, frame, drone, car)

    sim = Simulation(config)
    try:
        metrics = sim.run(frame_hook=combined if hooks else None)
    finally:
        sim.write_log(os.path.join(out_dir, LOG_FILENAME))
        sim._finalize_metrics()
        with open(os.path.join(out_dir, METRICS_FILENAME), "w", encoding="utf-8") as fh:
            fh.write(sim.metrics.as_block())
    return metrics


def export_frames(run_dir, every_k: int, out_dir=None) -> list[str]:
    """Re-render a finished run deterministically, dumping every k-th frame.

    ``run_dir`` must contain the ``config.txt`` echo written by
    :func:`run_simulation`.  Returns the written file paths.
    """
    if every_k < 1:
        raise ValueError("every_k must be >= 1")
    config = load_config(os.path.join(run_dir, CONFIG_FILENAME))
    out_dir = out_dir if out_dir is not None else os.path.join(run_dir, "frames")
    os.makedirs(out_dir, exist_ok=True)
    written: list[str] = []

    def hook(index, t, frame, drone, car):
        if index % every_k == 0:
            path = os.path.join(out_dir, f"frame_{index:06d}.ppm")
            write_ppm(path, frame)
            written.append(path)

    Simulation(config).run(frame_hook=hook)
    return written
