"""Detect/track switching: the vision target selector.

Starts in Detect mode; a successful detection seeds the tracker and switches
to Track.  The detector is only consulted again after the tracker reports
``loss_frames`` consecutive low-confidence steps (partial occlusion or the
target leaving the view).
"""

from __future__ import annotations

import enum
from typing import Callable, Optional

import numpy as np

from .boxes import BoundingBox, fuse_boxes
from .detector import ColorBlobDetector
from .tracker import LOSS_THRESHOLD, DegenerateRoiError, TrackerState, camshift_init, camshift_step


class SelectorMode(enum.Enum):
    DETECT = "detect"
    TRACK = "track"


class TargetSelector:
    """Owns the detect/track state machine for one target."""

    def __init__(
        self,
        detector: Callable[[np.ndarray], list[BoundingBox]] | None = None,
        fuse_mode: str = "maximum",
        loss_frames: int = 3,
        loss_threshold: float = LOSS_THRESHOLD,
    ):
        self.detector = detector if detector is not None else ColorBlobDetector()
        self.fuse_mode = fuse_mode
        self.loss_frames = loss_frames
        self.loss_threshold = loss_threshold
        self.mode = SelectorMode.DETECT
        self.tracker: Optional[TrackerState] = None
        self.loss_count = 0

    def step(self, frame: np.ndarray) -> Optional[BoundingBox]:
        """Process one frame; returns the target box or None."""
        if self.mode is SelectorMode.DETECT:
            box = fuse_boxes(self.detector(frame), self.fuse_mode)
            if box is None:
                return None
            try:
                self.tracker = camshift_init(frame, box)
            except DegenerateRoiError:
                return None
            self.mode = SelectorMode.TRACK
            self.loss_count = 0
            return box

        self.tracker, box, confidence = camshift_step(self.tracker, frame)
        if confidence < self.loss_threshold:
            self.loss_count += 1
            if self.loss_count >= self.loss_frames:
                self.mode = SelectorMode.DETECT
                self.tracker = None
            return None
        self.loss_count = 0
        return box
