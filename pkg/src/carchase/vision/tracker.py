"""Continuously adaptive mean-shift tracking on hue back-projection.

The tracker keeps a 16-bin hue histogram of the target (pixels gated by
minimum saturation/value), scaled so its peak is 1.  Each step back-projects
the histogram into a probability image over the search window, mean-shifts
the window to the probability centroid until it moves less than a pixel (or
20 iterations), then adapts the window size from the zeroth moment while
preserving the initial aspect ratio.

Confidence is the window-mass fraction M00 / (255 * window area); a step
whose confidence falls below the loss threshold leaves the window unchanged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .boxes import BoundingBox

HUE_BINS = 16
SATURATION_GATE = 0.2
VALUE_GATE = 0.1
MIN_ROI_AREA = 16.0
MIN_WINDOW = 8.0
MAX_ITERATIONS = 20
CONVERGENCE_PX = 1.0
LOSS_THRESHOLD = 0.05


class DegenerateRoiError(ValueError):
    """ROI carries no usable hue signal (too small or fully unsaturated)."""


@dataclass(frozen=True)
class TrackerState:
    hue_hist: np.ndarray  # HUE_BINS weights, peak scaled to 1
    window: BoundingBox
    aspect: float  # w/h of the initial ROI
    confidence: float = 1.0


def rgb_to_hsv(rgb: np.ndarray) -> np.ndarray:
    """Vectorized RGB (uint8) -> HSV with all channels in [0, 1)."""
    arr = rgb.astype(np.float64) / 255.0
    maxc = arr.max(axis=-1)
    minc = arr.min(axis=-1)
    delta = maxc - minc
    sat = np.where(maxc > 0.0, delta / np.where(maxc > 0.0, maxc, 1.0), 0.0)
    r, g, b = arr[..., 0], arr[..., 1], arr[..., 2]
    safe = np.where(delta > 0.0, delta, 1.0)
    hue = np.where(
        maxc == r,
        (g - b) / safe,
        np.where(maxc == g, 2.0 + (b - r) / safe, 4.0 + (r - g) / safe),
    )
    hue = np.where(delta > 0.0, (hue / 6.0) % 1.0, 0.0)
    return np.stack([hue, sat, maxc], axis=-1)


def _hue_bins_and_gate(pixels: np.ndarray):
    hsv = rgb_to_hsv(pixels)
    gate = (hsv[..., 1] >= SATURATION_GATE) & (hsv[..., 2] >= VALUE_GATE)
    bins = np.minimum((hsv[..., 0] * HUE_BINS).astype(np.int32), HUE_BINS - 1)
    return bins, gate


def camshift_init(frame: np.ndarray, roi: BoundingBox) -> TrackerState:
    """Build the tracker state from the target's initial bounding box."""
    h, w = frame.shape[0], frame.shape[1]
    roi = roi.clamped(w, h)
    if roi.area < MIN_ROI_AREA:
        raise DegenerateRoiError(f"ROI area {roi.area:.1f} px^2 is below {MIN_ROI_AREA}")
    rows, cols = roi.pixel_slice(w, h)
    bins, gate = _hue_bins_and_gate(frame[rows, cols])
    if not np.any(gate):
        raise DegenerateRoiError("ROI has no saturated pixels; no hue signal")
    hist = np.bincount(bins[gate].ravel(), minlength=HUE_BINS).astype(np.float64)
    hist /= hist.max()
    return TrackerState(hue_hist=hist, window=roi, aspect=roi.w / roi.h)


def _backproject(state: TrackerState, frame: np.ndarray, window: BoundingBox):
    """(prob patch scaled to [0, 255], row offset, col offset) for the window."""
    h, w = frame.shape[0], frame.shape[1]
    rows, cols = window.pixel_slice(w, h)
    bins, gate = _hue_bins_and_gate(frame[rows, cols])
    prob = state.hue_hist[bins] * 255.0
    prob[~gate] = 0.0
    return prob, rows.start, cols.start


def camshift_step(state: TrackerState, frame: np.ndarray):
    """One tracking update.

    Returns ``(new_state, box, confidence)`` where ``box`` estimates the
    target extent (the search window stays twice that size).  On loss
    (confidence below threshold) the window is left unchanged.
    """
    h, w = frame.shape[0], frame.shape[1]
    window = state.window
    m00 = 0.0
    for _ in range(MAX_ITERATIONS):
        prob, r0, c0 = _backproject(state, frame, window)
        m00 = float(prob.sum())
        if m00 <= 0.0:
            break
        ys = np.arange(prob.shape[0]) + r0 + 0.5
        xs = np.arange(prob.shape[1]) + c0 + 0.5
        cx = float((prob.sum(axis=0) * xs).sum() / m00)
        cy = float((prob.sum(axis=1) * ys).sum() / m00)
        move = math.hypot(cx - window.u, cy - window.v)
        window = window.moved_to(cx, cy).clamped(w, h)
        if move < CONVERGENCE_PX:
            break

    confidence = m00 / (255.0 * window.area) if window.area > 0 else 0.0
    if confidence < LOSS_THRESHOLD:
        return replace(state, confidence=confidence), state.window, confidence

    # Target extent from the matching mass; search window is twice that size.
    extent = math.sqrt(m00 / 255.0)
    box_w = max(extent * math.sqrt(state.aspect), MIN_WINDOW / 2.0)
    box_h = max(extent / math.sqrt(state.aspect), MIN_WINDOW / 2.0)
    box = BoundingBox(window.u, window.v, box_w, box_h).clamped(w, h)
    side = 2.0 * extent
    new_window = BoundingBox(
        window.u,
        window.v,
        max(side * math.sqrt(state.aspect), MIN_WINDOW),
        max(side / math.sqrt(state.aspect), MIN_WINDOW),
    ).clamped(w, h)
    return replace(state, window=new_window, confidence=confidence), box, confidence
