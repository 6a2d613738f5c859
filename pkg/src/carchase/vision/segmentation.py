"""Grayscale conversion, balanced-histogram thresholding, blob labeling.

This is the image-cropping stack: RGB -> gray -> binary -> 8-connected
components -> blob selection.  Binary images are boolean arrays, gray images
uint8, both (height, width).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .boxes import BoundingBox

LUMA_WEIGHTS = (0.299, 0.587, 0.114)  # ITU-R BT.601


class EmptyHistogramError(ValueError):
    """Histogram holds no samples."""


def to_grayscale(frame: np.ndarray) -> np.ndarray:
    """Per-pixel luma, rounded to the nearest integer."""
    rgb = frame.astype(np.float64)
    luma = LUMA_WEIGHTS[0] * rgb[..., 0] + LUMA_WEIGHTS[1] * rgb[..., 1] + LUMA_WEIGHTS[2] * rgb[..., 2]
    return np.clip(np.rint(luma), 0, 255).astype(np.uint8)


def histogram256(gray: np.ndarray) -> np.ndarray:
    """256-bin intensity histogram; counts sum to the pixel count."""
    return np.bincount(np.asarray(gray, dtype=np.uint8).ravel(), minlength=256).astype(np.int64)


def bht_threshold(hist) -> int:
    """Balanced histogram thresholding.

    Works on the interval [i_s, i_e] between the outermost occupied bins,
    split at its midpoint i_m into a left weight (bins i_s..i_m) and a right
    weight (i_m+1..i_e).  Each iteration removes the outermost bin of the
    heavier side and re-centers i_m on the shrunk interval, transferring bin
    weights across the moved midpoint.  The surviving midpoint is the
    threshold.
    """
    hist = np.asarray(hist, dtype=np.int64)
    if np.any(hist < 0):
        raise ValueError("histogram counts must be non-negative")
    nonzero = np.flatnonzero(hist)
    if nonzero.size == 0:
        raise EmptyHistogramError("histogram holds no samples")
    i_s, i_e = int(nonzero[0]), int(nonzero[-1])
    i_m = (i_s + i_e) // 2
    w_left = int(hist[i_s : i_m + 1].sum())
    w_right = int(hist[i_m + 1 : i_e + 1].sum())
    while i_s < i_e:
        if w_left == 0 and w_right == 0:
            break
        if w_left > w_right:
            w_left -= int(hist[i_s])
            i_s += 1
        else:
            w_right -= int(hist[i_e])
            i_e -= 1
        new_m = (i_s + i_e) // 2
        while i_m < new_m:
            i_m += 1
            w_left += int(hist[i_m])
            w_right -= int(hist[i_m])
        while i_m > new_m:
            w_left -= int(hist[i_m])
            w_right += int(hist[i_m])
            i_m -= 1
    return i_m


def binarize(gray: np.ndarray, threshold: int, polarity: str = "above") -> np.ndarray:
    """Foreground mask: intensities at/above the threshold, or at/below it."""
    gray = np.asarray(gray)
    if polarity == "above":
        return gray >= threshold
    if polarity == "below":
        return gray <= threshold
    raise ValueError(f"unknown polarity {polarity!r}")


@dataclass(frozen=True)
class BlobStats:
    label: int
    area: int
    centroid: tuple[float, float]  # (u, v) mass centroid
    box: BoundingBox
    mean_intensity: float


class _UnionFind:
    __slots__ = ("parent",)

    def __init__(self):
        self.parent = []

    def make(self) -> int:
        self.parent.append(len(self.parent))
        return len(self.parent) - 1

    def find(self, a: int) -> int:
        p = self.parent
        root = a
        while p[root] != root:
            root = p[root]
        while p[a] != root:
            p[a], a = root, p[a]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def _rows_runs(binary: np.ndarray):
    """Per row, ndarray of (start, end) half-open column runs of foreground."""
    h, w = binary.shape
    padded = np.zeros((h, w + 2), dtype=np.int8)
    padded[:, 1:-1] = binary
    diff = np.diff(padded, axis=1)
    out = []
    for r in range(h):
        starts = np.flatnonzero(diff[r] == 1)
        ends = np.flatnonzero(diff[r] == -1)
        out.append(np.column_stack([starts, ends]))
    return out


def _label_runs(binary: np.ndarray):
    """Union-find labeling over row runs; 8-connectivity (diagonal touch counts)."""
    runs_by_row = _rows_runs(binary)
    uf = _UnionFind()
    labels_by_row = []
    prev_runs = None
    prev_labels = None
    for runs in runs_by_row:
        labels = [uf.make() for _ in range(len(runs))]
        if prev_runs is not None and len(runs) and len(prev_runs):
            j = 0
            for i, (s, e) in enumerate(runs):
                while j < len(prev_runs) and prev_runs[j][1] + 1 <= s:
                    j += 1
                k = j
                while k < len(prev_runs) and prev_runs[k][0] < e + 1:
                    uf.union(labels[i], prev_labels[k])
                    k += 1
        labels_by_row.append(labels)
        prev_runs, prev_labels = runs, labels
    return runs_by_row, labels_by_row, uf


def label_components(binary: np.ndarray, connectivity: int = 8, intensity: np.ndarray | None = None):
    """Blob statistics of the 8-connected foreground components.

    Implemented over row runs with union-find, so cost scales with the number
    of runs rather than pixels.  ``intensity`` (same shape) feeds the per-blob
    mean intensity; without it foreground is treated as white (255).
    """
    if connectivity != 8:
        raise ValueError("only 8-connectivity is supported")
    binary = np.asarray(binary).astype(bool)
    runs_by_row, labels_by_row, uf = _label_runs(binary)

    stats: dict[int, list] = {}
    for r, (runs, labels) in enumerate(zip(runs_by_row, labels_by_row)):
        for (s, e), lab in zip(runs, labels):
            root = uf.find(lab)
            n = int(e - s)
            cols_sum = (s + e - 1) * n / 2.0
            if intensity is not None:
                inten = float(np.asarray(intensity[r, s:e], dtype=np.float64).sum())
            else:
                inten = 255.0 * n
            rec = stats.get(root)
            if rec is None:
                stats[root] = [n, cols_sum, r * n, s, e - 1, r, r, inten]
            else:
                rec[0] += n
                rec[1] += cols_sum
                rec[2] += r * n
                rec[3] = min(rec[3], s)
                rec[4] = max(rec[4], e - 1)
                rec[6] = r
                rec[7] += inten

    blobs = []
    for i, root in enumerate(sorted(stats)):
        area, cols, rows, c0, c1, r0, r1, inten = stats[root]
        box = BoundingBox((c0 + c1) / 2.0, (r0 + r1) / 2.0, c1 - c0 + 1.0, r1 - r0 + 1.0)
        blobs.append(
            BlobStats(
                label=i + 1,
                area=int(area),
                centroid=(cols / area, rows / area),
                box=box,
                mean_intensity=inten / area,
            )
        )
    return blobs


def label_image(binary: np.ndarray, connectivity: int = 8) -> np.ndarray:
    """Label raster (0 = background) matching :func:`label_components` labels."""
    if connectivity != 8:
        raise ValueError("only 8-connectivity is supported")
    binary = np.asarray(binary).astype(bool)
    runs_by_row, labels_by_row, uf = _label_runs(binary)
    roots = sorted({uf.find(lab) for labels in labels_by_row for lab in labels})
    renumber = {root: i + 1 for i, root in enumerate(roots)}
    out = np.zeros(binary.shape, dtype=np.int32)
    for r, (runs, labels) in enumerate(zip(runs_by_row, labels_by_row)):
        for (s, e), lab in zip(runs, labels):
            out[r, s:e] = renumber[uf.find(lab)]
    return out


@dataclass(frozen=True)
class BlobCriteria:
    """Size and intensity gates for blob selection."""

    min_area: float = 25.0
    max_area: float = float("inf")
    min_intensity: float = 0.0
    max_intensity: float = 255.0

    def accepts(self, blob: BlobStats) -> bool:
        return (
            self.min_area <= blob.area <= self.max_area
            and self.min_intensity <= blob.mean_intensity <= self.max_intensity
        )


def select_blob(blobs, criteria: BlobCriteria = BlobCriteria()):
    """Bounding box of the largest blob passing the criteria, or None.

    Area ties break toward the smaller centroid row, then column.
    """
    passing = [b for b in blobs if criteria.accepts(b)]
    if not passing:
        return None
    best = min(passing, key=lambda b: (-b.area, b.centroid[1], b.centroid[0]))
    return best.box


def crop_target(frame: np.ndarray, criteria: BlobCriteria = BlobCriteria()):
    """Full cropping pipeline: gray -> balanced threshold -> dark foreground ->
    8-connected blobs -> selection.  Returns a BoundingBox or None."""
    gray = to_grayscale(frame)
    threshold = bht_threshold(histogram256(gray))
    mask = binarize(gray, threshold, polarity="below")
    return select_blob(label_components(mask, intensity=gray), criteria)
