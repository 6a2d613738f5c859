"""Axis-aligned bounding boxes in pixel coordinates."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace


@dataclass(frozen=True)
class BoundingBox:
    """Box described by its centroid (u, v) and its width/height in pixels.

    Edges are continuous: left = u - w/2, right = u + w/2, and likewise
    vertically with v increasing downward.
    """

    u: float
    v: float
    w: float
    h: float

    def __post_init__(self):
        if self.w <= 0.0 or self.h <= 0.0:
            raise ValueError("box dimensions must be positive")

    @property
    def area(self) -> float:
        return self.w * self.h

    @property
    def left(self) -> float:
        return self.u - self.w / 2.0

    @property
    def right(self) -> float:
        return self.u + self.w / 2.0

    @property
    def top(self) -> float:
        return self.v - self.h / 2.0

    @property
    def bottom(self) -> float:
        return self.v + self.h / 2.0

    @classmethod
    def from_edges(cls, left: float, top: float, right: float, bottom: float) -> "BoundingBox":
        return cls((left + right) / 2.0, (top + bottom) / 2.0, right - left, bottom - top)

    def pixel_slice(self, width: int, height: int) -> tuple[slice, slice]:
        """(row, col) slices of the pixels covered, clamped to the image."""
        c0 = max(0, int(math.floor(self.left)))
        c1 = min(width, int(math.ceil(self.right)))
        r0 = max(0, int(math.floor(self.top)))
        r1 = min(height, int(math.ceil(self.bottom)))
        return slice(r0, max(r0, r1)), slice(c0, max(c0, c1))

    def clamped(self, width: int, height: int) -> "BoundingBox":
        left = min(max(self.left, 0.0), width - 1.0)
        right = max(min(self.right, float(width)), left + 1.0)
        top = min(max(self.top, 0.0), height - 1.0)
        bottom = max(min(self.bottom, float(height)), top + 1.0)
        return BoundingBox.from_edges(left, top, right, bottom)

    def moved_to(self, u: float, v: float) -> "BoundingBox":
        return replace(self, u=u, v=v)

    def iou(self, other: "BoundingBox") -> float:
        iw = min(self.right, other.right) - max(self.left, other.left)
        ih = min(self.bottom, other.bottom) - max(self.top, other.top)
        if iw <= 0.0 or ih <= 0.0:
            return 0.0
        inter = iw * ih
        return inter / (self.area + other.area - inter)


def fuse_boxes(boxes, mode: str = "maximum"):
    """Collapse multiple detections into one box.

    ``maximum`` returns the tight box covering the union of all boxes;
    ``average`` returns the box with the mean centroid and mean dimensions.
    Returns None on empty input.
    """
    boxes = list(boxes)
    if not boxes:
        return None
    if mode == "maximum":
        return BoundingBox.from_edges(
            min(b.left for b in boxes),
            min(b.top for b in boxes),
            max(b.right for b in boxes),
            max(b.bottom for b in boxes),
        )
    if mode == "average":
        n = len(boxes)
        return BoundingBox(
            sum(b.u for b in boxes) / n,
            sum(b.v for b in boxes) / n,
            sum(b.w for b in boxes) / n,
            sum(b.h for b in boxes) / n,
        )
    raise ValueError(f"unknown fuse mode {mode!r}")
