"""Conventions shared by the production and reference metric forms.

Everything the metric definitions leave open is decided here once:

- Predictions are 8-bit maps divided by 255; no min-max stretching.
- S-measure: all-zero ground truth scores `1 - mean(P)`, all-one ground
  truth scores `mean(P)`. Standard deviations use ddof=1 and are 0 for
  fewer than two samples. Means of constant regions are exact. The
  region SSIM normalizes by `max(N - 1, 1)`;
  an empty quadrant scores 0 (its area weight is 0 anyway); when both
  SSIM numerator and denominator vanish the score is 1. The final value
  is clamped at 0.
- E-measure: thresholds `k / (levels - 1)`, binarization `P >= t`. The
  enhanced matrix is `1 - FM` for all-zero ground truth and `FM` for
  all-one ground truth. Its sum is divided by N so scores stay in [0, 1].
- Weighted F-measure: a background pixel takes the error of its nearest
  foreground pixel, ties going to the smallest row-major index. The
  Gaussian smoothing replicates edge pixels, so a constant error field
  stays constant up to the image border, and the smoothed error only
  replaces the raw one when lower by more than `SMOOTH_TOL`. An
  all-zero ground truth scores 0.
"""

from __future__ import annotations

import math

import numpy as np
import numpy.typing as npt

from codbench.exceptions import ValidationError
from codbench.lib.tensor import Array
from codbench.lib.tensor import ShapeError

EPS = float(np.spacing(1))
ALPHA = 0.5
LEVELS = 256
GAUSS_WINDOW = 7
GAUSS_SIGMA = 5.0
IMPORTANCE_DECAY = math.log(0.5) / 5.0
BETA2 = 1.0
NEIGHBOURS = 8
# a smoothed error replaces the raw one only when lower by more than this
SMOOTH_TOL = 1e-12

BoolArray = npt.NDArray[np.bool_]


def as_gray_map(values: npt.ArrayLike) -> Array:
    """Validate a prediction: 2-D, finite, clamped to [0, 1]."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 2:
        raise ShapeError("gray map", dimension="rank", expected=2, got=arr.ndim)
    if not np.all(np.isfinite(arr)):
        raise ValidationError(reason="prediction holds NaN or Inf")
    return np.clip(arr, 0.0, 1.0)


def as_binary_mask(values: npt.ArrayLike) -> BoolArray:
    """Validate a ground truth: 2-D and strictly binary."""
    arr = np.asarray(values)
    if arr.ndim != 2:
        raise ShapeError("binary mask", dimension="rank", expected=2, got=arr.ndim)
    if arr.dtype != np.bool_:
        if not np.all((arr == 0) | (arr == 1)):
            raise ValidationError(reason="ground truth must hold only 0 and 1")
        arr = arr.astype(bool)
    return arr


def check_pair(op: str, pred: npt.ArrayLike, gt: npt.ArrayLike) -> tuple[Array, BoolArray]:
    p = as_gray_map(pred)
    g = as_binary_mask(gt)
    if p.shape != g.shape:
        dim = "height" if p.shape[0] != g.shape[0] else "width"
        raise ShapeError(op, dimension=dim, expected=g.shape, got=p.shape)
    return p, g


def thresholds(levels: int = LEVELS) -> Array:
    return np.arange(levels, dtype=np.float64) / (levels - 1)


def s_degenerate(pred: Array, gt: BoolArray) -> float | None:
    """S-measure of a single-class ground truth, None otherwise."""
    y = gt.mean()
    if y == 0:
        return float(1.0 - pred.mean())
    if y == 1:
        return float(pred.mean())
    return None


def ssim_denominator(n: int) -> int:
    return max(n - 1, 1)


def split_point(gt: BoolArray) -> tuple[int, int]:
    """Column x and row y the region term splits at: the rounded
    foreground centroid plus one (the image centre without foreground)."""
    h, w = gt.shape
    if not gt.any():
        return int(np.round(w / 2)) + 1, int(np.round(h / 2)) + 1
    rows, cols = np.nonzero(gt)
    return int(np.round(cols.mean())) + 1, int(np.round(rows.mean())) + 1


def gaussian_kernel(size: int = GAUSS_WINDOW, sigma: float = GAUSS_SIGMA) -> Array:
    """Normalized 2-D Gaussian with tiny tails zeroed."""
    half = (size - 1) / 2.0
    y, x = np.ogrid[-half : half + 1, -half : half + 1]
    h = np.exp(-(x * x + y * y) / (2.0 * sigma * sigma))
    h[h < np.finfo(h.dtype).eps * h.max()] = 0.0
    total = h.sum()
    return h / total if total != 0 else h


def region_mean(values: Array) -> float:
    """Mean of a region; a constant region returns its value exactly so
    that its deviations vanish exactly."""
    flat = values.ravel()
    if flat.size and np.all(flat == flat[0]):
        return float(flat[0])
    return float(flat.mean())
