"""Segmentation quality metrics and boundary rendering.

All metrics are pure functions on label maps and return values in [0, 1]:

- asa: best pixel accuracy achievable by giving each region its dominant
  ground-truth segment.
- boundary_recall: fraction of ground-truth boundary pixels with a region
  boundary within a Chebyshev tolerance (default 2 px).
- contour_density: fraction of pixels lying on region boundaries.
- shape_regularity: size-weighted product of per-region convexity, hull
  circularity and axis balance.
- nestedness: size-weighted containment of one partition's regions in
  another's; exactly 1.0 for two levels of one merge sequence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import binary_dilation
from scipy.spatial import ConvexHull, QhullError

from .imgio import validate_label_map


@dataclass(frozen=True)
class MetricsReport:
    k: int
    asa: float
    br: float
    cd: float
    src: float
    eps: int
    nestedness: float | None = None

    def to_dict(self) -> dict:
        out = {
            "k": self.k,
            "asa": self.asa,
            "br": self.br,
            "cd": self.cd,
            "src": self.src,
            "eps": self.eps,
        }
        if self.nestedness is not None:
            out["nestedness"] = self.nestedness
        return out


def boundary_mask(labels: np.ndarray) -> np.ndarray:
    """Boolean mask of pixels with a 4-neighbor holding a different label."""
    lab = np.asarray(labels)
    mask = np.zeros(lab.shape, dtype=bool)
    horiz = lab[:, :-1] != lab[:, 1:]
    mask[:, :-1] |= horiz
    mask[:, 1:] |= horiz
    vert = lab[:-1, :] != lab[1:, :]
    mask[:-1, :] |= vert
    mask[1:, :] |= vert
    return mask


def _require_same_shape(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise ValueError(f"label maps disagree on shape: {a.shape} vs {b.shape}")


def _dominant_overlap_total(labels: np.ndarray, ref: np.ndarray) -> int:
    """Sum over regions of the largest single-ref-segment overlap, in pixels."""
    stride = int(ref.max()) + 1
    pairs = labels.ravel().astype(np.int64) * stride + ref.ravel()
    uniq, counts = np.unique(pairs, return_counts=True)
    regions = uniq // stride
    starts = np.flatnonzero(np.diff(regions, prepend=regions[0] - 1))
    return int(np.maximum.reduceat(counts, starts).sum())


def asa(labels: np.ndarray, gt: np.ndarray) -> float:
    """Achievable segmentation accuracy of `labels` against ground truth."""
    lab = np.asarray(labels)
    gt = np.asarray(gt)
    _require_same_shape(lab, gt)
    return _dominant_overlap_total(lab, gt) / lab.size


def _crack_mask(labels: np.ndarray) -> np.ndarray:
    """Single-width boundary pixels: a pixel whose right or down neighbor
    differs. One pixel per label transition, so distances between masks
    measure the offset between the boundaries themselves."""
    lab = np.asarray(labels)
    mask = np.zeros(lab.shape, dtype=bool)
    mask[:, :-1] |= lab[:, :-1] != lab[:, 1:]
    mask[:-1, :] |= lab[:-1, :] != lab[1:, :]
    return mask


def boundary_recall(labels: np.ndarray, gt: np.ndarray, eps: int = 2) -> float:
    """Fraction of GT boundary pixels within Chebyshev distance eps of a
    region boundary. A ground truth with no boundary scores 1.0.

    Boundaries are taken single-width (crack-aligned) on both sides so the
    tolerance measures the distance between boundaries, not mask widths.
    """
    lab = np.asarray(labels)
    gt = np.asarray(gt)
    _require_same_shape(lab, gt)
    if eps < 0:
        raise ValueError(f"eps must be >= 0, got {eps}")
    gt_edges = _crack_mask(gt)
    n_gt = int(gt_edges.sum())
    if n_gt == 0:
        return 1.0
    sp_edges = _crack_mask(lab)
    if eps > 0:
        sp_edges = binary_dilation(sp_edges, np.ones((2 * eps + 1, 2 * eps + 1), bool))
    return int(sp_edges[gt_edges].sum()) / n_gt


def contour_density(labels: np.ndarray) -> float:
    """Fraction of pixels on region boundaries."""
    return float(boundary_mask(labels).mean())


def nestedness(fine: np.ndarray, coarse: np.ndarray) -> float:
    """Size-weighted containment of fine regions within coarse regions.

    Equals 1.0 exactly (integer arithmetic) iff every fine region lies
    inside a single coarse region.
    """
    fine = np.asarray(fine)
    coarse = np.asarray(coarse)
    _require_same_shape(fine, coarse)
    return _dominant_overlap_total(fine, coarse) / fine.size


def _hull_terms(xs: np.ndarray, ys: np.ndarray, size: int) -> tuple[float, float]:
    """(convexity, circularity) of a region from its pixel-center hull.

    Degenerate hulls (fewer than 3 distinct points, or collinear) get
    convexity 1 and circularity 0; the axis-balance factor already zeroes
    axis-degenerate regions.
    """
    points = np.stack([xs, ys], axis=1).astype(np.float64)
    if size < 3:
        return 1.0, 0.0
    try:
        hull = ConvexHull(points)
    except QhullError:
        return 1.0, 0.0
    area = hull.volume
    perimeter = hull.area
    if area <= 0.0 or perimeter <= 0.0:
        return 1.0, 0.0
    convexity = min(1.0, size / area)
    circularity = min(1.0, 4.0 * math.pi * area / perimeter**2)
    return convexity, circularity


def src(labels: np.ndarray) -> float:
    """Shape regularity: size-weighted convexity * circularity * balance.

    Per region, convexity is pixel count over convex hull area (clamped to
    1), circularity is the hull's isoperimetric ratio (clamped to 1), and
    balance is min/max of the pixel coordinate standard deviations.
    Single-pixel regions score 1 on all three factors.
    """
    lab = np.asarray(labels)
    n = validate_label_map(lab)
    total = lab.size
    flat = lab.ravel()
    order = np.argsort(flat, kind="stable")
    ys, xs = np.unravel_index(order, lab.shape)
    counts = np.bincount(flat, minlength=n)
    offsets = np.concatenate([[0], np.cumsum(counts)])

    score = 0.0
    for k in range(n):
        lo, hi = offsets[k], offsets[k + 1]
        size = int(counts[k])
        if size == 1:
            score += size / total
            continue
        rx = xs[lo:hi].astype(np.float64)
        ry = ys[lo:hi].astype(np.float64)
        sx = rx.std()
        sy = ry.std()
        balance = min(sx, sy) / max(sx, sy) if max(sx, sy) > 0 else 0.0
        if balance == 0.0:
            continue
        convexity, circularity = _hull_terms(rx, ry, size)
        score += (size / total) * convexity * circularity * balance
    return score


def render_overlay(
    img: np.ndarray, labels: np.ndarray, color: tuple[int, int, int] = (255, 0, 0)
) -> np.ndarray:
    """Copy of the image with region-boundary pixels painted `color`."""
    image = np.asarray(img)
    lab = np.asarray(labels)
    if image.shape[:2] != lab.shape:
        raise ValueError(f"image {image.shape} does not match labels {lab.shape}")
    out = image.copy()
    out[boundary_mask(lab)] = np.asarray(color, dtype=out.dtype)
    return out


def evaluate(
    labels: np.ndarray,
    gts: list[np.ndarray],
    eps: int = 2,
    coarse: np.ndarray | None = None,
) -> MetricsReport:
    """Full report for one partition; ASA/BR averaged over the ground truths."""
    lab = np.asarray(labels)
    k = validate_label_map(lab)
    if not gts:
        raise ValueError("at least one ground truth is required")
    asa_vals = [asa(lab, g) for g in gts]
    br_vals = [boundary_recall(lab, g, eps) for g in gts]
    return MetricsReport(
        k=k,
        asa=float(np.mean(asa_vals)),
        br=float(np.mean(br_vals)),
        cd=contour_density(lab),
        src=src(lab),
        eps=eps,
        nestedness=None if coarse is None else nestedness(lab, coarse),
    )
