"""Headless quadrotor visual-servoing simulator.

A drone with a rigidly mounted forward camera detects and tracks a car
driving a double-lane-change path in a synthetic scene; the full loop is
rendering -> segmentation/detection -> adaptive mean-shift tracking ->
reference generation -> integral-backstepping flight control -> rigid-body
dynamics.
"""

from .camera import AcquisitionPose, CameraIntrinsics, CameraPose, MountConfig
from .car import CarPath, CarState, PathConfig, car_path
from .config import ConfigError, SimConfig, build_config, default_config, load_config
from .dynamics import ControlCommand, DroneParams, DroneState, RotorSpeeds
from .geometry import EulerAngles, FrameTag, TaggedPoint
from .render import SceneBox, SceneModel, render
from .simulate import RunMetrics, Simulation, export_frames, run_simulation
from .vision import BoundingBox, TargetSelector, VisionError

__version__ = "0.1.0"

__all__ = [
    "AcquisitionPose",
    "BoundingBox",
    "CameraIntrinsics",
    "CameraPose",
    "CarPath",
    "CarState",
    "ConfigError",
    "ControlCommand",
    "DroneParams",
    "DroneState",
    "EulerAngles",
    "FrameTag",
    "MountConfig",
    "PathConfig",
    "RotorSpeeds",
    "RunMetrics",
    "SceneBox",
    "SceneModel",
    "SimConfig",
    "Simulation",
    "TaggedPoint",
    "TargetSelector",
    "VisionError",
    "build_config",
    "car_path",
    "default_config",
    "export_frames",
    "load_config",
    "render",
    "run_simulation",
]
