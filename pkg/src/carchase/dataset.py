"""Acquisition-dataset generation and detector evaluation.

``acquire_dataset`` sweeps the camera over the radius-r sphere around the
parked car, renders positive frames (car present) and negatives (empty
scene, denser sweep for the configured positive:negative ratio), runs the
cropping pipeline on every positive and writes the ROI table.

ROI CSV schema: ``frame_index,u_bb,v_bb,w_bb,h_bb`` (centroid, width, height
in pixels), one row per positive frame where cropping succeeded.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

from .camera import spherical_acquisition_poses, spiral_acquisition_poses
from .config import SimConfig
from .geometry import fi_to_fvr
from .render import SceneModel, car_box, read_ppm, render, write_ppm
from .vision.boxes import BoundingBox
from .vision.detector import detect
from .vision.segmentation import crop_target

ROI_FILENAME = "roi.csv"
ROI_HEADER = "frame_index,u_bb,v_bb,w_bb,h_bb"
POSITIVES_DIR = "positives"
NEGATIVES_DIR = "negatives"


class DatasetFormatError(ValueError):
    """Dataset directory is missing files or malformed."""


@dataclass
class AcquisitionReport:
    positives: int = 0
    negatives: int = 0
    crop_failures: int = 0
    mean_roi_area: float = 0.0

    @property
    def crop_failure_rate(self) -> float:
        return self.crop_failures / self.positives if self.positives else 0.0

    def as_block(self) -> str:
        return (
            f"positives = {self.positives}\n"
            f"negatives = {self.negatives}\n"
            f"crop_failures = {self.crop_failures}\n"
            f"crop_failure_rate = {self.crop_failure_rate:.9g}\n"
            f"mean_roi_area = {self.mean_roi_area:.9g}\n"
        )


def _poses(config: SimConfig, n_alpha: int, target_fvr):
    acq = config.acquisition
    if acq.mode == "spiral":
        return spiral_acquisition_poses(acq.radius, n_alpha * acq.n_beta, acq.spiral_turns, target_fvr)
    return spherical_acquisition_poses(acq.radius, n_alpha, acq.n_beta, target_fvr)


def acquire_dataset(config: SimConfig, out_dir) -> AcquisitionReport:
    """Render the acquisition sweep and write frames plus the ROI table."""
    acq = config.acquisition
    pos_dir = os.path.join(out_dir, POSITIVES_DIR)
    neg_dir = os.path.join(out_dir, NEGATIVES_DIR)
    os.makedirs(pos_dir, exist_ok=True)
    os.makedirs(neg_dir, exist_ok=True)

    car = car_box((0.0, 0.0, 0.0), 0.0, color=config.car_color)
    scene_car = SceneModel(boxes=(car,))
    scene_empty = SceneModel(boxes=())
    # The sphere sweep centers on the parked car's volumetric center.
    target_fvr = fi_to_fvr(car.center)

    report = AcquisitionReport()
    rows: list[str] = []
    areas: list[float] = []
    for i, pose in enumerate(_poses(config, acq.n_alpha, target_fvr)):
        frame = render(scene_car, config.intrinsics, pose.camera_pose())
        write_ppm(os.path.join(pos_dir, f"frame_{i:06d}.ppm"), frame)
        box = crop_target(frame, config.detector.criteria)
        if box is None:
            report.crop_failures += 1
        else:
            rows.append(f"{i},{box.u:.9g},{box.v:.9g},{box.w:.9g},{box.h:.9g}")
            areas.append(box.area)
        report.positives += 1

    for i, pose in enumerate(_poses(config, acq.n_alpha * acq.negative_ratio, target_fvr)):
        frame = render(scene_empty, config.intrinsics, pose.camera_pose())
        write_ppm(os.path.join(neg_dir, f"frame_{i:06d}.ppm"), frame)
        report.negatives += 1

    with open(os.path.join(out_dir, ROI_FILENAME), "w", encoding="utf-8", newline="\n") as fh:
        fh.write(ROI_HEADER + "\n")
        for row in rows:
            fh.write(row + "\n")
    if areas:
        report.mean_roi_area = sum(areas) / len(areas)
    return report


def read_roi_csv(path) -> dict[int, BoundingBox]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = [ln.strip() for ln in fh if ln.strip()]
    except OSError as exc:
        raise DatasetFormatError(f"cannot read ROI table {path}: {exc}") from exc
    if not lines or lines[0] != ROI_HEADER:
        raise DatasetFormatError(f"{path}: missing header {ROI_HEADER!r}")
    rois: dict[int, BoundingBox] = {}
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != 5:
            raise DatasetFormatError(f"{path}: malformed row {ln!r}")
        try:
            idx = int(parts[0])
            u, v, w, h = (float(p) for p in parts[1:])
        except ValueError as exc:
            raise DatasetFormatError(f"{path}: malformed row {ln!r}") from exc
        rois[idx] = BoundingBox(u, v, w, h)
    return rois


@dataclass
class EvaluationReport:
    positives: int = 0
    negatives: int = 0
    hits: int = 0
    false_positives: int = 0
    mean_iou: float = 0.0
    ious: list[float] = field(default_factory=list)

    @property
    def detection_rate(self) -> float:
        return self.hits / self.positives if self.positives else 0.0

    def as_block(self) -> str:
        return (
            f"positives = {self.positives}\n"
            f"negatives = {self.negatives}\n"
            f"detection_rate = {self.detection_rate:.9g}\n"
            f"mean_iou = {self.mean_iou:.9g}\n"
            f"false_positives = {self.false_positives}\n"
        )


def evaluate_detector(dataset_dir, config: SimConfig, iou_threshold: float = 0.5) -> EvaluationReport:
    """Score the configured detector against a dataset's ROI ground truth.

    A positive frame counts as a hit when some detection reaches the IoU
    threshold against its ROI row; any detection on a negative frame is a
    false positive.
    """
    pos_dir = os.path.join(dataset_dir, POSITIVES_DIR)
    neg_dir = os.path.join(dataset_dir, NEGATIVES_DIR)
    if not os.path.isdir(pos_dir):
        raise DatasetFormatError(f"{dataset_dir}: missing {POSITIVES_DIR}/ directory")
    rois = read_roi_csv(os.path.join(dataset_dir, ROI_FILENAME))

    report = EvaluationReport()
    for name in sorted(os.listdir(pos_dir)):
        if not name.endswith(".ppm"):
            continue
        index = int(name[len("frame_") : -len(".ppm")])
        frame = read_ppm(os.path.join(pos_dir, name))
        report.positives += 1
        truth = rois.get(index)
        if truth is None:
            continue
        boxes = detect(frame, config.detector)
        best = max((truth.iou(b) for b in boxes), default=0.0)
        if best >= iou_threshold:
            report.hits += 1
            report.ious.append(best)

    if os.path.isdir(neg_dir):
        for name in sorted(os.listdir(neg_dir)):
            if not name.endswith(".ppm"):
                continue
            frame = read_ppm(os.path.join(neg_dir, name))
            report.negatives += 1
            report.false_positives += len(detect(frame, config.detector))

    if report.ious:
        report.mean_iou = sum(report.ious) / len(report.ious)
    return report
