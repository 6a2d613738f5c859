"""Image stack: segmentation, detection, tracking and the target selector."""

from .boxes import BoundingBox, fuse_boxes
from .detector import ColorBlobDetector, DetectorConfig, VisionError, detect, distance_vector
from .segmentation import (
    BlobCriteria,
    BlobStats,
    EmptyHistogramError,
    bht_threshold,
    binarize,
    crop_target,
    histogram256,
    label_components,
    label_image,
    select_blob,
    to_grayscale,
)
from .selector import SelectorMode, TargetSelector
from .tracker import (
    DegenerateRoiError,
    TrackerState,
    camshift_init,
    camshift_step,
    rgb_to_hsv,
)

__all__ = [
    "BlobCriteria",
    "BlobStats",
    "BoundingBox",
    "ColorBlobDetector",
    "DegenerateRoiError",
    "DetectorConfig",
    "EmptyHistogramError",
    "SelectorMode",
    "TargetSelector",
    "TrackerState",
    "VisionError",
    "bht_threshold",
    "binarize",
    "camshift_init",
    "camshift_step",
    "crop_target",
    "detect",
    "distance_vector",
    "fuse_boxes",
    "histogram256",
    "label_components",
    "label_image",
    "rgb_to_hsv",
    "select_blob",
    "to_grayscale",
]
