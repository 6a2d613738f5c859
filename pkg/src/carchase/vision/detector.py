"""Color-blob target detector and the image-space error vector.

The detector segments pixels whose target channel dominates the other two by
a margin, labels the 8-connected blobs and returns every blob box passing the
size/intensity criteria.  It stands behind a plain callable interface
(frame -> list of boxes) so a trained cascade could be swapped in.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .boxes import BoundingBox
from .segmentation import BlobCriteria, label_components

_CHANNELS = {"red": 0, "green": 1, "blue": 2}


@dataclass(frozen=True)
class DetectorConfig:
    channel: str = "red"
    margin: int = 50
    criteria: BlobCriteria = field(default_factory=BlobCriteria)

    def __post_init__(self):
        if self.channel not in _CHANNELS:
            raise ValueError(f"unknown channel {self.channel!r}")


def detect(frame: np.ndarray, config: DetectorConfig = DetectorConfig()) -> list[BoundingBox]:
    """All bounding boxes of color-dominant blobs passing the criteria."""
    idx = _CHANNELS[config.channel]
    rgb = frame.astype(np.int16)
    target = rgb[..., idx]
    others = np.max(np.delete(rgb, idx, axis=-1), axis=-1)
    mask = (target - others) >= config.margin
    blobs = label_components(mask)
    return [b.box for b in blobs if config.criteria.accepts(b)]


class ColorBlobDetector:
    """Callable detector bound to a configuration."""

    def __init__(self, config: DetectorConfig = DetectorConfig()):
        self.config = config

    def __call__(self, frame: np.ndarray) -> list[BoundingBox]:
        return detect(frame, self.config)


@dataclass(frozen=True)
class VisionError:
    """Distance from the image centroid to the box centroid, plus box area."""

    e_u: float
    e_v: float
    area_bb: float


def distance_vector(box: BoundingBox, width: int, height: int) -> VisionError:
    """Image-center-minus-box-center error signals for the controller."""
    return VisionError(width / 2.0 - box.u, height / 2.0 - box.v, box.w * box.h)
