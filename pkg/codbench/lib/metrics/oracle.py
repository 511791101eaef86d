"""Reference forms of the benchmark metrics.

Each function follows the metric definition literally: explicit pixel
loops, brute-force nearest neighbours and distances, a direct
convolution loop and the full stack of binarized maps. They are slow and
exist to cross-check the production forms in `measures`. Only the
conventions of `conventions` are shared.
"""

from __future__ import annotations

import math

import numpy as np
import numpy.typing as npt

from codbench.lib.metrics import conventions as cv
from codbench.lib.metrics.measures import MetricScores
from codbench.lib.tensor import Array


def mae(pred: npt.ArrayLike, gt: npt.ArrayLike) -> float:
    p, g = cv.check_pair("mae", pred, gt)
    h, w = g.shape
    total = 0.0
    for i in range(h):
        for j in range(w):
            total += abs(float(p[i, j]) - float(g[i, j]))
    return total / (h * w)


# ============================================================================
# S-measure
# ============================================================================


def _std(values: list[float], mean: float) -> float:
    n = len(values)
    if n < 2:
        return 0.0
    return math.sqrt(sum((v - mean) ** 2 for v in values) / (n - 1))


def _object_score(values: list[float]) -> float:
    if not values:
        return 0.0
    x = cv.region_mean(np.asarray(values))
    return 2.0 * x / (x * x + 1.0 + _std(values, x) + cv.EPS)


def _ssim(p: list[float], g: list[float]) -> float:
    n = len(p)
    if n == 0:
        return 0.0
    x = cv.region_mean(np.asarray(p))
    y = cv.region_mean(np.asarray(g))
    d = cv.ssim_denominator(n)
    sxx = sum((a - x) ** 2 for a in p) / d
    syy = sum((b - y) ** 2 for b in g) / d
    sxy = sum((a - x) * (b - y) for a, b in zip(p, g, strict=True)) / d
    num = 4.0 * x * y * sxy
    den = (x * x + y * y) * (sxx + syy)
    if num != 0:
        return num / (den + cv.EPS)
    return 1.0 if den == 0 else 0.0


def s_measure(pred: npt.ArrayLike, gt: npt.ArrayLike, *, alpha: float = cv.ALPHA) -> float:
    p, g = cv.check_pair("s_measure", pred, gt)
    h, w = g.shape
    n_fg = sum(1 for i in range(h) for j in range(w) if g[i, j])
    if n_fg == 0:
        return 1.0 - sum(float(v) for v in p.ravel()) / (h * w)
    if n_fg == h * w:
        return sum(float(v) for v in p.ravel()) / (h * w)

    fg = [float(p[i, j]) for i in range(h) for j in range(w) if g[i, j]]
    bg = [1.0 - float(p[i, j]) for i in range(h) for j in range(w) if not g[i, j]]
    u = n_fg / (h * w)
    s_object = u * _object_score(fg) + (1.0 - u) * _object_score(bg)

    cy = sum(i for i in range(h) for j in range(w) if g[i, j]) / n_fg
    cx = sum(j for i in range(h) for j in range(w) if g[i, j]) / n_fg
    x, y = round(cx) + 1, round(cy) + 1
    s_region = 0.0
    covered = 0.0
    for k, (rows, cols) in enumerate(
        ((range(0, min(y, h)), range(0, min(x, w))),
         (range(0, min(y, h)), range(x, w)),
         (range(y, h), range(0, min(x, w))),
         (range(y, h), range(x, w)))
    ):
        weight = len(rows) * len(cols) / (h * w) if k < 3 else 1.0 - covered
        covered += weight
        qp = [float(p[i, j]) for i in rows for j in cols]
        qg = [float(g[i, j]) for i in rows for j in cols]
        s_region += weight * _ssim(qp, qg)

    return max(0.0, alpha * s_object + (1.0 - alpha) * s_region)


# ============================================================================
# E-measure
# ============================================================================


def e_measure_mean(pred: npt.ArrayLike, gt: npt.ArrayLike, *, levels: int = cv.LEVELS) -> float:
    p, g = cv.check_pair("e_measure", pred, gt)
    gf = g.astype(np.float64)
    n = g.size
    fm = (p[None, :, :] >= cv.thresholds(levels)[:, None, None]).astype(np.float64)

    if not g.any():
        enhanced = 1.0 - fm
    elif g.all():
        enhanced = fm
    else:
        d_fm = fm - fm.mean(axis=(1, 2), keepdims=True)
        d_gt = gf - gf.mean()
        align = 2.0 * d_gt * d_fm / (d_gt * d_gt + d_fm * d_fm + cv.EPS)
        enhanced = (align + 1.0) ** 2 / 4.0
    return float((enhanced.sum(axis=(1, 2)) / n).mean())


# ============================================================================
# Weighted F-measure
# ============================================================================


def _convolve(values: Array, kernel: Array) -> Array:
    h, w = values.shape
    kh, kw = kernel.shape
    ry, rx = kh // 2, kw // 2
    out = np.zeros_like(values)
    for i in range(h):
        for j in range(w):
            acc = 0.0
            for a in range(kh):
                for b in range(kw):
                    # clamp to the nearest edge pixel
                    y = min(max(i + ry - a, 0), h - 1)
                    x = min(max(j + rx - b, 0), w - 1)
                    acc += kernel[a, b] * values[y, x]
            out[i, j] = acc
    return out


def weighted_f_measure(
    pred: npt.ArrayLike,
    gt: npt.ArrayLike,
    *,
    beta2: float = cv.BETA2,
    window: int = cv.GAUSS_WINDOW,
    sigma: float = cv.GAUSS_SIGMA,
    decay: float = cv.IMPORTANCE_DECAY,
) -> float:
    p, g = cv.check_pair("weighted_f_measure", pred, gt)
    if not g.any():
        return 0.0
    h, w = g.shape
    err = np.abs(p - g)
    fg = [(i, j) for i in range(h) for j in range(w) if g[i, j]]

    spread = err.copy()
    dist = np.zeros((h, w))
    for i in range(h):
        for j in range(w):
            if g[i, j]:
                continue
            d2 = [(i - a) ** 2 + (j - b) ** 2 for a, b in fg]
            # argmin returns the first minimum, fg is in row-major order
            a, b = fg[int(np.argmin(d2))]
            spread[i, j] = err[a, b]
            dist[i, j] = math.sqrt(min(d2))

    smoothed = _convolve(spread, cv.gaussian_kernel(window, sigma))
    weighted = np.empty((h, w))
    for i in range(h):
        for j in range(w):
            if g[i, j]:
                better = smoothed[i, j] < err[i, j] - cv.SMOOTH_TOL
                weighted[i, j] = smoothed[i, j] if better else err[i, j]
            else:
                weighted[i, j] = err[i, j] * (2.0 - math.exp(decay * dist[i, j]))

    fg_sum = sum(weighted[i, j] for i, j in fg)
    bg_sum = sum(weighted[i, j] for i in range(h) for j in range(w) if not g[i, j])
    tp = len(fg) - fg_sum
    recall = 1.0 - fg_sum / len(fg)
    precision = tp / (tp + bg_sum + cv.EPS)
    return (1.0 + beta2) * recall * precision / (recall + beta2 * precision + cv.EPS)


def evaluate_pair(pred: npt.ArrayLike, gt: npt.ArrayLike) -> MetricScores:
    return MetricScores(
        s_alpha=s_measure(pred, gt),
        e_phi=e_measure_mean(pred, gt),
        f_beta_w=weighted_f_measure(pred, gt),
        mae=mae(pred, gt),
    )
