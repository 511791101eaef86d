"""Color-histogram contrast between object and background regions."""

from __future__ import annotations

import typing as t

import numpy as np
import numpy.typing as npt
from scipy import ndimage

from codbench.exceptions import ValidationError
from codbench.lib.tensor import Array

BANDWIDTH = 15
HIST_BINS = 8
CHI2_EPS = 1e-10

BoolArray = npt.NDArray[np.bool_]


class Bands(t.NamedTuple):
    """Pixels within `width` of the object boundary, inside and outside."""

    inner: BoolArray
    outer: BoolArray


def color_histogram(rgb: npt.ArrayLike, region: BoolArray, bins: int = HIST_BINS) -> Array:
    """Normalized joint histogram of the 8-bit RGB pixels in `region`.

    Returns a flat `bins**3` vector summing to 1, or all zeros for an
    empty region.
    """
    arr = np.asarray(rgb)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ValidationError(reason=f"expected an H x W x 3 image, got shape {arr.shape}")
    if arr.shape[:2] != region.shape:
        raise ValidationError(reason=f"image {arr.shape[:2]} and region {region.shape} differ in size")
    idx = (arr[region].astype(np.int64) * bins) // 256
    flat = (idx[:, 0] * bins + idx[:, 1]) * bins + idx[:, 2]
    hist = np.bincount(flat, minlength=bins**3).astype(np.float64)
    total = hist.sum()
    return hist / total if total > 0 else hist


def chi_square(h1: Array, h2: Array, eps: float = CHI2_EPS) -> float:
    """Half chi-square distance; in [0, 1] for normalized histograms."""
    return float(0.5 * np.sum((h1 - h2) ** 2 / (h1 + h2 + eps)))


def boundary_bands(mask: BoolArray, width: int = BANDWIDTH) -> Bands:
    """Euclidean bands of `width` pixels on both sides of the boundary."""
    inner = mask & (ndimage.distance_transform_edt(mask) <= width)
    outer = ~mask & (ndimage.distance_transform_edt(~mask) <= width)
    return Bands(inner=inner, outer=outer)


def global_contrast(rgb: npt.ArrayLike, mask: BoolArray, *, bins: int = HIST_BINS, eps: float = CHI2_EPS) -> float | None:
    """Chi-square between object and whole-background histograms; None
    when either region is empty."""
    if not mask.any() or mask.all():
        return None
    return chi_square(color_histogram(rgb, mask, bins), color_histogram(rgb, ~mask, bins), eps)


def local_contrast(
    rgb: npt.ArrayLike,
    mask: BoolArray,
    *,
    width: int = BANDWIDTH,
    bins: int = HIST_BINS,
    eps: float = CHI2_EPS,
) -> float | None:
    """Chi-square between the inner and outer boundary bands."""
    if not mask.any() or mask.all():
        return None
    bands = boundary_bands(mask, width)
    return chi_square(color_histogram(rgb, bands.inner, bins), color_histogram(rgb, bands.outer, bins), eps)


def surround_contrast(
    rgb: npt.ArrayLike,
    mask: BoolArray,
    *,
    width: int = BANDWIDTH,
    bins: int = HIST_BINS,
    eps: float = CHI2_EPS,
) -> float | None:
    """Chi-square between the whole object and the background band
    around it."""
    if not mask.any() or mask.all():
        return None
    outer = boundary_bands(mask, width).outer
    return chi_square(color_histogram(rgb, mask, bins), color_histogram(rgb, outer, bins), eps)
