"""Independent oracles shared across the test suite.

Everything in here is deliberately brute force: flood-fill labeling, pixel
counting IoU, corner-projection boxes.  These must stay independent of the
library paths they check.
"""

from __future__ import annotations

import numpy as np

from carchase.camera import project
from carchase.vision.boxes import BoundingBox


def flood_fill_labels(binary: np.ndarray) -> np.ndarray:
    """8-connected component labels by explicit stack-based flood fill."""
    binary = np.asarray(binary).astype(bool)
    h, w = binary.shape
    labels = np.zeros((h, w), dtype=np.int32)
    nxt = 0
    for r0 in range(h):
        for c0 in range(w):
            if not binary[r0, c0] or labels[r0, c0]:
                continue
            nxt += 1
            stack = [(r0, c0)]
            labels[r0, c0] = nxt
            while stack:
                r, c = stack.pop()
                for dr in (-1, 0, 1):
                    for dc in (-1, 0, 1):
                        rr, cc = r + dr, c + dc
                        if 0 <= rr < h and 0 <= cc < w and binary[rr, cc] and not labels[rr, cc]:
                            labels[rr, cc] = nxt
                            stack.append((rr, cc))
    return labels


def same_partition(a: np.ndarray, b: np.ndarray) -> bool:
    """True when two label rasters induce the same partition of the foreground."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape or np.any((a > 0) != (b > 0)):
        return False
    fg = a > 0
    pairs = set(zip(a[fg].tolist(), b[fg].tolist()))
    return len(pairs) == len({p[0] for p in pairs}) == len({p[1] for p in pairs})


def iou_pixels(b1: BoundingBox, b2: BoundingBox, scale: int = 4) -> float:
    """IoU by rasterizing both boxes on a fine grid and counting cells."""
    lo_u = min(b1.left, b2.left) - 1
    lo_v = min(b1.top, b2.top) - 1
    hi_u = max(b1.right, b2.right) + 1
    hi_v = max(b1.bottom, b2.bottom) + 1
    us = np.arange(lo_u, hi_u, 1.0 / scale) + 0.5 / scale
    vs = np.arange(lo_v, hi_v, 1.0 / scale) + 0.5 / scale
    uu, vv = np.meshgrid(us, vs)

    def mask(b):
        return (uu >= b.left) & (uu < b.right) & (vv >= b.top) & (vv < b.bottom)

    m1, m2 = mask(b1), mask(b2)
    inter = np.count_nonzero(m1 & m2)
    union = np.count_nonzero(m1 | m2)
    return inter / union if union else 0.0


def projected_corner_box(scene_box, intrinsics, pose):
    """Tight pixel box around the 8 projected corners, or None when any corner
    falls behind the near plane (convexity makes this the silhouette bound)."""
    pts = [project(c, intrinsics, pose) for c in scene_box.corners()]
    if any(p is None for p in pts):
        return None
    us = [p[0] for p in pts]
    vs = [p[1] for p in pts]
    return BoundingBox.from_edges(min(us), min(vs), max(us), max(vs))


def color_mask_box(frame: np.ndarray, color) -> BoundingBox | None:
    """Tight box around pixels exactly matching a color."""
    mask = (frame == np.asarray(color, dtype=np.uint8)).all(axis=2)
    if not mask.any():
        return None
    rows, cols = np.nonzero(mask)
    return BoundingBox.from_edges(cols.min(), rows.min(), cols.max() + 1.0, rows.max() + 1.0)
