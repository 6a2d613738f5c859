"""Flat ``key = value`` configuration with dotted sections.

The DEFAULTS table below is the authoritative key list; parsing an unknown
key is an error.  Lines starting with ``#`` and blank lines are ignored.
Scenario presets (``scenario = nominal | distractor | high-speed | custom``)
adjust defaults before explicit keys are applied, so any preset value can
still be overridden in the same file.

Positions in the ``init.*`` keys are virtual-frame coordinates (x standoff,
y up, z travel) relative to the car's starting point.  ``SIM_SEED`` in the
environment overrides the ``seed`` key.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

from .camera import CameraIntrinsics, MountConfig
from .car import PathConfig
from .control import AttitudeGains, IbGains, PidGains, ReferenceGains
from .dynamics import DroneParams
from .render import CAR_RED, DISTRACTOR_YELLOW
from .vision.detector import DetectorConfig
from .vision.segmentation import BlobCriteria


class ConfigError(ValueError):
    """Configuration file or value set cannot be used."""


DEFAULTS: dict[str, str] = {
    # -- run -------------------------------------------------------------
    "scenario": "nominal",  # nominal | distractor | high-speed | custom
    "duration": "60.0",  # s
    "frame_rate": "50.0",  # vision/control ticks per second
    # Physics step; must divide the frame period.  The yaw damping gain over
    # the yaw inertia puts a ~3 krad/s pole in the inner loop, so the held
    # command needs dt < 2*Iz/kd_psi ~ 0.65 ms to stay stable.
    "dt_physics": "0.00025",
    "seed": "0",  # recorded for reproducibility (SIM_SEED overrides)
    "output.dir": "run",  # default output directory
    "output.frame_every": "0",  # dump every k-th frame during simulate (0 = off)
    # -- drone physical parameters ----------------------------------------
    "drone.mass": "0.65",  # kg
    "drone.arm_length": "0.23",  # m
    "drone.thrust_factor": "7.5e-7",  # kg
    "drone.drag_factor": "3.13e-5",  # kg*m
    "drone.inertia_x": "7.5e-3",  # kg*m^2
    "drone.inertia_y": "7.5e-3",  # kg*m^2
    "drone.inertia_z": "1.3e-3",  # kg*m^2
    "drone.gravity": "9.81",  # m/s^2
    "drone.omega_max": "2000.0",  # rad/s rotor ceiling
    # -- initial pose (virtual frame, relative to the car start) -----------
    "init.x": "-15.0",  # m standoff axis
    "init.y": "4.0",  # m above ground
    "init.z": "0.0",  # m travel axis (auto-trim adjusts when enabled)
    "init.roll": "0.0",  # rad
    "init.pitch": "0.0",  # rad
    "init.yaw": "0.0",  # rad (auto-trim adjusts when enabled)
    "sim.auto_trim": "true",  # start in cruise trim (matched speed, preloaded loops)
    # -- camera ------------------------------------------------------------
    # Wide-angle optics (~130 deg horizontal FOV), matching the fisheye-class
    # cameras of small consumer drones.  The image-loop gain scales with the
    # focal length; above ~175 px the bearing-chase loop turns unstable with
    # the stock reference-generator gains.
    "camera.focal": "150.0",  # px
    "camera.cu": "320.0",
    "camera.cv": "240.0",
    "camera.width": "640",
    "camera.height": "480",
    "camera.mount_pitch": "0.21",  # rad, fixed down-tilt of the optical axis
    # -- car path ------------------------------------------------------------
    "path.speed": "10.0",  # m/s
    "path.lane_width": "3.5",  # m
    "path.approach": "100.0",  # m before the first transition
    "path.transition": "25.0",  # m per lane shift
    "path.hold": "25.0",  # m in the offset lane
    "path.shift_sign": "-1",  # lane shift direction along the standoff axis
    "path.boost_factor": "1.0",  # speed multiplier from boost_time onward
    "path.boost_time": "26.0",  # s
    # -- distractor vehicle ---------------------------------------------------
    "distractor.enabled": "false",
    "distractor.offset_x": "3.5",  # m, lane offset on the far side
    "distractor.offset_z": "7.0",  # m ahead along travel
    # -- reference generator gains --------------------------------------------
    "kp_psi_r": "1e-5",
    "ki_psi_r": "1e-3",
    "kp_theta_r": "1e-5",
    "ki_theta_r": "1e-3",
    "kp_x_r": "1e-6",
    "ki_x_r": "6e-6",
    "kp_y_r": "1e-2",
    "ki_y_r": "1e-2",
    "kp_z_r": "15.0",
    "ki_z_r": "57.5",
    "kd_z_r": "3.75",
    # -- attitude / thrust loop gains -------------------------------------------
    "kp_theta_att": "12.0",
    "kd_theta_att": "4.0",
    "kp_phi_att": "8.0",
    "kd_phi_att": "4.0",
    "kp_psi_att": "10.0",
    "kd_psi_att": "4.0",
    "kp_y_att": "1000.0",
    "kd_y_att": "200.0",
    # -- integral backstepping ----------------------------------------------------
    "ib.c1": "2.0",
    "ib.c2": "0.5",
    "ib.c3": "2.0",
    "ib.c4": "0.5",
    "ib.lambda1": "0.025",
    "ib.lambda2": "0.025",
    "ib.max_tilt": "0.5",  # rad clamp on tilt references
    "ib.u_t_min": "0.1",  # N division guard
    "ib.int_clamp": "50.0",  # m*s anti-windup bound
    # -- loop orientation (fixed by the standoff test; see module docs) -----------
    "wire.z_loop_sign": "-1",
    "wire.phi_ref_sign": "-1",
    # -- integral clamps of the reference loops -----------------------------------
    "clamp.psi_r": "1000.0",  # px*s
    "clamp.theta_r": "1000.0",  # px*s
    "clamp.x_r": "5e6",  # px^2*s
    "clamp.y_r": "2000.0",  # rad*s
    "clamp.z_r": "50.0",  # rad*s
    # -- detector / selector -------------------------------------------------------
    "detector.channel": "red",
    "detector.margin": "50",
    "detector.min_area": "25.0",
    "detector.max_area": "inf",
    "selector.fuse": "maximum",  # maximum | average
    "selector.loss_frames": "3",
    "selector.loss_threshold": "0.05",
    "area_ref": "0.0",  # px^2; 0 = lock from the first detected box
    # -- acquisition sweep (acquire command) -----------------------------------------
    "acquire.radius": "15.0",  # m sphere radius
    "acquire.n_alpha": "12",
    "acquire.n_beta": "6",
    "acquire.negative_ratio": "2",  # negatives per positive
    "acquire.mode": "grid",  # grid | spiral
    "acquire.spiral_turns": "4.0",
}

_SCENARIOS = {
    "nominal": {},
    "distractor": {"distractor.enabled": "true"},
    "high-speed": {"path.boost_factor": "2.5"},
    "custom": {},
}


def parse_config_text(text: str) -> dict[str, str]:
    """Raw key -> value mapping from config text; unknown keys are errors."""
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in DEFAULTS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        values[key] = value
    return values


def _resolve(overrides: dict[str, str]) -> dict[str, str]:
    scenario = overrides.get("scenario", DEFAULTS["scenario"])
    if scenario not in _SCENARIOS:
        raise ConfigError(f"unknown scenario {scenario!r}")
    resolved = dict(DEFAULTS)
    resolved.update(_SCENARIOS[scenario])
    resolved.update(overrides)
    resolved["scenario"] = scenario
    if "SIM_SEED" in os.environ:
        resolved["seed"] = os.environ["SIM_SEED"]
    return resolved


def _as_float(values, key) -> float:
    try:
        return float(values[key])
    except ValueError as exc:
        raise ConfigError(f"{key}: {values[key]!r} is not a number") from exc


def _as_int(values, key) -> int:
    try:
        return int(values[key])
    except ValueError as exc:
        raise ConfigError(f"{key}: {values[key]!r} is not an integer") from exc


def _as_bool(values, key) -> bool:
    v = values[key].lower()
    if v in ("true", "1", "yes", "on"):
        return True
    if v in ("false", "0", "no", "off"):
        return False
    raise ConfigError(f"{key}: {values[key]!r} is not a boolean")


@dataclass(frozen=True)
class WiringConfig:
    """Loop-orientation signs; see the standoff notes in the control module."""

    z_loop_sign: float = -1.0
    phi_ref_sign: float = -1.0


@dataclass(frozen=True)
class SelectorConfig:
    fuse_mode: str = "maximum"
    loss_frames: int = 3
    loss_threshold: float = 0.05


@dataclass(frozen=True)
class AcquisitionConfig:
    radius: float = 15.0
    n_alpha: int = 12
    n_beta: int = 6
    negative_ratio: int = 2
    mode: str = "grid"
    spiral_turns: float = 4.0


@dataclass(frozen=True)
class SimConfig:
    scenario: str
    duration: float
    frame_rate: float
    dt_physics: float
    seed: int
    output_dir: str
    frame_every: int
    drone: DroneParams
    init_fvr: tuple[float, float, float]
    init_attitude: tuple[float, float, float]
    auto_trim: bool
    intrinsics: CameraIntrinsics
    mount: MountConfig
    path: PathConfig
    distractor_enabled: bool
    distractor_offset: tuple[float, float]
    reference_gains: ReferenceGains
    attitude_gains: AttitudeGains
    ib_gains: IbGains
    ib_max_tilt: float
    ib_u_t_min: float
    ib_int_clamp: float
    wiring: WiringConfig
    clamps: dict = field(default_factory=dict)
    detector: DetectorConfig = field(default_factory=DetectorConfig)
    selector: SelectorConfig = field(default_factory=SelectorConfig)
    area_ref: float = 0.0
    acquisition: AcquisitionConfig = field(default_factory=AcquisitionConfig)
    raw: dict = field(default_factory=dict)

    @property
    def frame_period(self) -> float:
        return 1.0 / self.frame_rate

    @property
    def substeps(self) -> int:
        return round(self.frame_period / self.dt_physics)

    @property
    def n_frames(self) -> int:
        return math.ceil(self.duration * self.frame_rate)

    @property
    def car_color(self) -> tuple[int, int, int]:
        return CAR_RED

    @property
    def distractor_color(self) -> tuple[int, int, int]:
        return DISTRACTOR_YELLOW

    def config_text(self) -> str:
        """Resolved configuration, re-emittable as a config file."""
        return "\n".join(f"{k} = {self.raw[k]}" for k in sorted(self.raw)) + "\n"


def build_config(values: dict[str, str]) -> SimConfig:
    v = _resolve(values)

    duration = _as_float(v, "duration")
    frame_rate = _as_float(v, "frame_rate")
    dt_physics = _as_float(v, "dt_physics")
    if duration <= 0.0:
        raise ConfigError("duration must be positive")
    if frame_rate <= 0.0 or dt_physics <= 0.0:
        raise ConfigError("frame_rate and dt_physics must be positive")
    substeps = (1.0 / frame_rate) / dt_physics
    if abs(substeps - round(substeps)) > 1e-9 or round(substeps) < 1:
        raise ConfigError(
            f"dt_physics ({dt_physics}) must divide the frame period ({1.0 / frame_rate})"
        )

    try:
        drone = DroneParams(
            mass=_as_float(v, "drone.mass"),
            arm_length=_as_float(v, "drone.arm_length"),
            thrust_factor=_as_float(v, "drone.thrust_factor"),
            drag_factor=_as_float(v, "drone.drag_factor"),
            inertia_x=_as_float(v, "drone.inertia_x"),
            inertia_y=_as_float(v, "drone.inertia_y"),
            inertia_z=_as_float(v, "drone.inertia_z"),
            gravity=_as_float(v, "drone.gravity"),
            omega_max=_as_float(v, "drone.omega_max"),
        )
        intrinsics = CameraIntrinsics(
            focal_px=_as_float(v, "camera.focal"),
            cu=_as_float(v, "camera.cu"),
            cv=_as_float(v, "camera.cv"),
            width=_as_int(v, "camera.width"),
            height=_as_int(v, "camera.height"),
        )
        path = PathConfig(
            speed=_as_float(v, "path.speed"),
            lane_width=_as_float(v, "path.lane_width"),
            approach_length=_as_float(v, "path.approach"),
            transition_length=_as_float(v, "path.transition"),
            hold_length=_as_float(v, "path.hold"),
            shift_sign=_as_float(v, "path.shift_sign"),
            boost_factor=_as_float(v, "path.boost_factor"),
            boost_time=_as_float(v, "path.boost_time"),
        )
        detector = DetectorConfig(
            channel=v["detector.channel"],
            margin=_as_int(v, "detector.margin"),
            criteria=BlobCriteria(
                min_area=_as_float(v, "detector.min_area"),
                max_area=_as_float(v, "detector.max_area"),
            ),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    if v["selector.fuse"] not in ("maximum", "average"):
        raise ConfigError(f"selector.fuse: unknown mode {v['selector.fuse']!r}")
    if v["acquire.mode"] not in ("grid", "spiral"):
        raise ConfigError(f"acquire.mode: unknown mode {v['acquire.mode']!r}")

    reference_gains = ReferenceGains(
        psi_r=PidGains(_as_float(v, "kp_psi_r"), _as_float(v, "ki_psi_r")),
        theta_r=PidGains(_as_float(v, "kp_theta_r"), _as_float(v, "ki_theta_r")),
        x_r=PidGains(_as_float(v, "kp_x_r"), _as_float(v, "ki_x_r")),
        y_r=PidGains(_as_float(v, "kp_y_r"), _as_float(v, "ki_y_r")),
        z_r=PidGains(_as_float(v, "kp_z_r"), _as_float(v, "ki_z_r"), _as_float(v, "kd_z_r")),
    )
    attitude_gains = AttitudeGains(
        theta=PidGains(_as_float(v, "kp_theta_att"), kd=_as_float(v, "kd_theta_att")),
        phi=PidGains(_as_float(v, "kp_phi_att"), kd=_as_float(v, "kd_phi_att")),
        psi=PidGains(_as_float(v, "kp_psi_att"), kd=_as_float(v, "kd_psi_att")),
        y=PidGains(_as_float(v, "kp_y_att"), kd=_as_float(v, "kd_y_att")),
    )
    ib_gains = IbGains(
        c1=_as_float(v, "ib.c1"),
        c2=_as_float(v, "ib.c2"),
        c3=_as_float(v, "ib.c3"),
        c4=_as_float(v, "ib.c4"),
        lambda1=_as_float(v, "ib.lambda1"),
        lambda2=_as_float(v, "ib.lambda2"),
    )

    return SimConfig(
        scenario=v["scenario"],
        duration=duration,
        frame_rate=frame_rate,
        dt_physics=dt_physics,
        seed=_as_int(v, "seed"),
        output_dir=v["output.dir"],
        frame_every=_as_int(v, "output.frame_every"),
        drone=drone,
        init_fvr=(_as_float(v, "init.x"), _as_float(v, "init.y"), _as_float(v, "init.z")),
        init_attitude=(_as_float(v, "init.roll"), _as_float(v, "init.pitch"), _as_float(v, "init.yaw")),
        auto_trim=_as_bool(v, "sim.auto_trim"),
        intrinsics=intrinsics,
        mount=MountConfig(pitch=_as_float(v, "camera.mount_pitch")),
        path=path,
        distractor_enabled=_as_bool(v, "distractor.enabled"),
        distractor_offset=(_as_float(v, "distractor.offset_x"), _as_float(v, "distractor.offset_z")),
        reference_gains=reference_gains,
        attitude_gains=attitude_gains,
        ib_gains=ib_gains,
        ib_max_tilt=_as_float(v, "ib.max_tilt"),
        ib_u_t_min=_as_float(v, "ib.u_t_min"),
        ib_int_clamp=_as_float(v, "ib.int_clamp"),
        wiring=WiringConfig(
            z_loop_sign=_as_float(v, "wire.z_loop_sign"),
            phi_ref_sign=_as_float(v, "wire.phi_ref_sign"),
        ),
        clamps={
            "psi_r": _as_float(v, "clamp.psi_r"),
            "theta_r": _as_float(v, "clamp.theta_r"),
            "x_r": _as_float(v, "clamp.x_r"),
            "y_r": _as_float(v, "clamp.y_r"),
            "z_r": _as_float(v, "clamp.z_r"),
        },
        detector=detector,
        selector=SelectorConfig(
            fuse_mode=v["selector.fuse"],
            loss_frames=_as_int(v, "selector.loss_frames"),
            loss_threshold=_as_float(v, "selector.loss_threshold"),
        ),
        area_ref=_as_float(v, "area_ref"),
        acquisition=AcquisitionConfig(
            radius=_as_float(v, "acquire.radius"),
            n_alpha=_as_int(v, "acquire.n_alpha"),
            n_beta=_as_int(v, "acquire.n_beta"),
            negative_ratio=_as_int(v, "acquire.negative_ratio"),
            mode=v["acquire.mode"],
            spiral_turns=_as_float(v, "acquire.spiral_turns"),
        ),
        raw=v,
    )


def load_config(path) -> SimConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return build_config(parse_config_text(text))


def default_config(**overrides: str) -> SimConfig:
    """Config built purely from defaults plus keyword overrides (key names with
    '.' spelled as given, e.g. ``default_config(**{"path.speed": "12"})``)."""
    return build_config(dict(overrides))
