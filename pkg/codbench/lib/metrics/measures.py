"""Production forms of the four benchmark metrics."""

from __future__ import annotations

import typing as t

import numpy as np
import numpy.typing as npt
from scipy import ndimage
from scipy import spatial

from codbench.lib.metrics import conventions as cv
from codbench.lib.tensor import Array

if t.TYPE_CHECKING:
    from codbench.config.bench.metrics import MetricsConfig


class MetricScores(t.NamedTuple):
    """Scores of one prediction. MAE is lower-better, the others
    higher-better; all lie in [0, 1]."""

    s_alpha: float
    e_phi: float
    f_beta_w: float
    mae: float


# ============================================================================
# MAE
# ============================================================================


def mae(pred: npt.ArrayLike, gt: npt.ArrayLike) -> float:
    p, g = cv.check_pair("mae", pred, gt)
    return float(np.mean(np.abs(p - g)))


# ============================================================================
# S-measure
# ============================================================================


def _object_similarity(values: Array) -> float:
    if values.size == 0:
        return 0.0
    x = cv.region_mean(values)
    sigma = float(np.std(values, ddof=1)) if values.size > 1 else 0.0
    return 2.0 * x / (x * x + 1.0 + sigma + cv.EPS)


def _s_object(p: Array, g: cv.BoolArray) -> float:
    u = float(g.mean())
    return u * _object_similarity(p[g]) + (1.0 - u) * _object_similarity(1.0 - p[~g])


def _ssim(p: Array, g: Array) -> float:
    n = p.size
    if n == 0:
        return 0.0
    x = cv.region_mean(p)
    y = cv.region_mean(g)
    d = cv.ssim_denominator(n)
    dp, dg = p - x, g - y
    sigma_x = float((dp * dp).sum()) / d
    sigma_y = float((dg * dg).sum()) / d
    sigma_xy = float((dp * dg).sum()) / d
    num = 4.0 * x * y * sigma_xy
    den = (x * x + y * y) * (sigma_x + sigma_y)
    if num != 0:
        return num / (den + cv.EPS)
    return 1.0 if den == 0 else 0.0


def _s_region(p: Array, g: cv.BoolArray) -> float:
    h, w = g.shape
    x, y = cv.split_point(g)
    area = h * w
    w1 = x * y / area
    w2 = y * (w - x) / area
    w3 = (h - y) * x / area
    w4 = 1.0 - w1 - w2 - w3
    gf = g.astype(np.float64)
    quads = (
        (slice(0, y), slice(0, x)),
        (slice(0, y), slice(x, w)),
        (slice(y, h), slice(0, x)),
        (slice(y, h), slice(x, w)),
    )
    return sum(wt * _ssim(p[q], gf[q]) for wt, q in zip((w1, w2, w3, w4), quads, strict=True))


def s_measure(pred: npt.ArrayLike, gt: npt.ArrayLike, *, alpha: float = cv.ALPHA) -> float:
    """Structure measure: `alpha * object + (1 - alpha) * region`,
    clamped at 0.

    Raises:
        ShapeError: When the maps differ in size.
        ValidationError: On a non-binary ground truth.
    """
    p, g = cv.check_pair("s_measure", pred, gt)
    degenerate = cv.s_degenerate(p, g)
    if degenerate is not None:
        return degenerate
    return max(0.0, alpha * _s_object(p, g) + (1.0 - alpha) * _s_region(p, g))


# ============================================================================
# E-measure
# ============================================================================


def _enhanced(a: Array | float, b: Array | float) -> Array:
    align = 2.0 * a * b / (a * a + b * b + cv.EPS)
    return np.asarray((align + 1.0) ** 2 / 4.0)


def e_measure_curve(pred: npt.ArrayLike, gt: npt.ArrayLike, *, levels: int = cv.LEVELS) -> Array:
    """Enhanced-alignment score at every threshold.

    Pixels fall in four classes per threshold (binarized prediction x
    ground truth); every pixel of a class has the same enhanced value, so
    the scores follow from the class counts, obtained for all thresholds
    at once by searching the sorted predictions.
    """
    p, g = cv.check_pair("e_measure", pred, gt)
    n = g.size
    n_fg = int(g.sum())
    ts = cv.thresholds(levels)

    on_fg = np.sort(p[g])
    on_bg = np.sort(p[~g])
    fg_fg = on_fg.size - np.searchsorted(on_fg, ts, side="left")
    fg_bg = on_bg.size - np.searchsorted(on_bg, ts, side="left")
    fm = fg_fg + fg_bg

    if n_fg == 0:
        total = (n - fm).astype(np.float64)
    elif n_fg == n:
        total = fm.astype(np.float64)
    else:
        bg_fg = n_fg - fg_fg
        bg_bg = (n - n_fg) - fg_bg
        mean_fm = fm / n
        mean_gt = n_fg / n
        f_on, f_off = 1.0 - mean_fm, -mean_fm
        g_on, g_off = 1.0 - mean_gt, -mean_gt
        total = (
            fg_fg * _enhanced(f_on, g_on)
            + fg_bg * _enhanced(f_on, g_off)
            + bg_fg * _enhanced(f_off, g_on)
            + bg_bg * _enhanced(f_off, g_off)
        )
    return np.asarray(total / n, dtype=np.float64)


def e_measure_mean(pred: npt.ArrayLike, gt: npt.ArrayLike, *, levels: int = cv.LEVELS) -> float:
    """Mean enhanced-alignment measure over uniform thresholds."""
    return float(e_measure_curve(pred, gt, levels=levels).mean())


# ============================================================================
# Weighted F-measure
# ============================================================================


def nearest_foreground(gt: cv.BoolArray) -> npt.NDArray[np.intp]:
    """Flat index of the nearest foreground pixel for every background
    pixel (row-major order), ties going to the smallest flat index.

    Uses a k-d tree over foreground coordinates; when all k returned
    neighbours are tied the full tie set is fetched with a ball query.
    """
    h, w = gt.shape
    fg = np.argwhere(gt)
    bg = np.argwhere(~gt)
    if bg.size == 0:
        return np.empty(0, dtype=np.intp)
    tree = spatial.cKDTree(fg)
    k = min(cv.NEIGHBOURS, len(fg))
    _, idx = tree.query(bg, k=k)
    idx = np.asarray(idx, dtype=np.intp).reshape(len(bg), k)

    d2 = ((bg[:, None, :] - fg[idx]) ** 2).sum(axis=-1)
    best = d2.min(axis=1)
    tied = d2 == best[:, None]
    choice = np.where(tied, idx, len(fg)).min(axis=1)

    for row in np.nonzero(tied.all(axis=1) & (len(fg) > k))[0]:
        radius = float(np.sqrt(best[row])) + 1e-6
        near = np.asarray(tree.query_ball_point(bg[row], r=radius), dtype=np.intp)
        exact = near[((fg[near] - bg[row]) ** 2).sum(axis=1) == best[row]]
        choice[row] = exact.min()

    return np.asarray(fg[choice, 0] * w + fg[choice, 1], dtype=np.intp)


def weighted_f_measure(
    pred: npt.ArrayLike,
    gt: npt.ArrayLike,
    *,
    beta2: float = cv.BETA2,
    window: int = cv.GAUSS_WINDOW,
    sigma: float = cv.GAUSS_SIGMA,
    decay: float = cv.IMPORTANCE_DECAY,
) -> float:
    """Weighted F-measure with dependency-corrected errors and
    distance-based background importance.

    Raises:
        ShapeError: When the maps differ in size.
        ValidationError: On a non-binary ground truth.
    """
    p, g = cv.check_pair("weighted_f_measure", pred, gt)
    if not g.any():
        return 0.0
    bg = ~g
    err = np.abs(p - g)

    spread = err.copy()
    spread[bg] = err.ravel()[nearest_foreground(g)]
    # edge-replicating border: a constant error field stays constant
    smoothed = ndimage.convolve(spread, cv.gaussian_kernel(window, sigma), mode="nearest")
    corrected = np.where(g & (smoothed < err - cv.SMOOTH_TOL), smoothed, err)

    dist = ndimage.distance_transform_edt(bg)
    importance = np.where(g, 1.0, 2.0 - np.exp(decay * dist))
    weighted = corrected * importance

    tp = float(g.sum()) - float(weighted[g].sum())
    fp = float(weighted[bg].sum())
    recall = 1.0 - float(weighted[g].mean())
    precision = tp / (tp + fp + cv.EPS)
    return (1.0 + beta2) * recall * precision / (recall + beta2 * precision + cv.EPS)


# ============================================================================
# Combined
# ============================================================================


def evaluate_pair(pred: npt.ArrayLike, gt: npt.ArrayLike, config: MetricsConfig | None = None) -> MetricScores:
    """All four metrics of one prediction."""
    p, g = cv.check_pair("evaluate_pair", pred, gt)
    if config is None:
        return MetricScores(s_measure(p, g), e_measure_mean(p, g), weighted_f_measure(p, g), mae(p, g))
    return MetricScores(
        s_alpha=s_measure(p, g, alpha=config.alpha),
        e_phi=e_measure_mean(p, g, levels=config.thresholds),
        f_beta_w=weighted_f_measure(
            p,
            g,
            beta2=config.beta2,
            window=config.gauss_window,
            sigma=config.gauss_sigma,
            decay=config.importance_decay,
        ),
        mae=mae(p, g),
    )
