"""Boundary-weighted BCE and IoU losses with deep supervision.

Both losses are fused tape kernels: forward and gradient with respect to
the logits are computed in closed form. Each is normalized per image by
its weight map and then averaged over the batch.
"""

from __future__ import annotations

import typing as t

import numpy as np
import numpy.typing as npt
from scipy import ndimage
from scipy import special

from codbench.exceptions import ValidationError
from codbench.lib.tensor import Array
from codbench.lib.tensor import ShapeError
from codbench.lib.tensor import Tensor
from codbench.lib.tensor import add
from codbench.lib.tensor import track

WEIGHT_WINDOW = 31
WEIGHT_GAIN = 5.0


def _as_mask(op: str, pred: Tensor, mask: npt.ArrayLike) -> Array:
    g = np.asarray(mask, dtype=pred.dtype)
    if g.shape != pred.shape:
        raise ShapeError(op, dimension="mask", expected=pred.shape, got=g.shape)
    if not np.all((g == 0) | (g == 1)):
        raise ValidationError(reason=f"{op}: ground truth must be binary")
    return g


def _as_weights(op: str, pred: Tensor, g: Array, weights: npt.ArrayLike | None) -> Array:
    w = loss_weights(g) if weights is None else np.asarray(weights, dtype=pred.dtype)
    if w.shape != pred.shape:
        raise ShapeError(op, dimension="weights", expected=pred.shape, got=w.shape)
    return w


def loss_weights(mask: npt.ArrayLike, *, window: int = WEIGHT_WINDOW, gain: float = WEIGHT_GAIN) -> Array:
    """Per-pixel weights `1 + gain * |meanpool(G) - G|`.

    The mean pool is a `window x window` box over the last two axes with
    zero padding counted in the average, so the weight is 1 wherever the
    mask is locally constant and grows near object boundaries.
    """
    g = np.asarray(mask, dtype=np.float64)
    size = (1,) * (g.ndim - 2) + (window, window)
    pooled = ndimage.uniform_filter(g, size=size, mode="constant", cval=0.0)
    return 1.0 + gain * np.abs(pooled - g)


def _image_sums(arr: Array) -> Array:
    """Sums per batch item of an N x 1 x H x W map (a single item otherwise)."""
    return (arr.reshape(arr.shape[0], -1) if arr.ndim == 4 else arr.reshape(1, -1)).sum(axis=1)


def _expand(values: Array, ndim: int) -> Array:
    return values.reshape((-1,) + (1,) * (ndim - 1)) if ndim == 4 else values.reshape((1,) * ndim)


def weighted_bce(pred: Tensor, mask: npt.ArrayLike, weights: npt.ArrayLike | None = None) -> Tensor:
    """Weighted binary cross entropy on logits, `sum(w * bce) / sum(w)`
    per image, averaged over the batch.

    Raises:
        ShapeError: When mask or weights differ in shape from `pred`.
        ValidationError: On a non-binary mask.
    """
    g = _as_mask("weighted_bce", pred, mask)
    w = _as_weights("weighted_bce", pred, g, weights)

    x = pred.data
    bce = np.maximum(x, 0.0) - x * g + np.log1p(np.exp(-np.abs(x)))
    wsum = _image_sums(w)
    value = np.mean(_image_sums(w * bce) / wsum)
    scale = _expand(1.0 / (wsum.shape[0] * wsum), x.ndim)

    def backward(grad: Array) -> tuple[Array]:
        return (grad * scale * w * (special.expit(x) - g),)

    return track("weighted_bce", (pred,), np.asarray(value, dtype=x.dtype), backward)


def weighted_iou(pred: Tensor, mask: npt.ArrayLike, weights: npt.ArrayLike | None = None) -> Tensor:
    """Weighted soft IoU loss `1 - sum(w p g) / sum(w (p + g - p g))` with
    `p = sigmoid(pred)`, per image, averaged over the batch. An image whose
    weighted union is zero contributes 0.

    Raises:
        ShapeError: When mask or weights differ in shape from `pred`.
        ValidationError: On a non-binary mask.
    """
    g = _as_mask("weighted_iou", pred, mask)
    w = _as_weights("weighted_iou", pred, g, weights)

    x = pred.data
    p = special.expit(x)
    inter = _image_sums(w * p * g)
    union = _image_sums(w * (p + g - p * g))
    defined = union > 0
    safe = np.where(defined, union, 1.0)
    batch = inter.shape[0]
    value = np.where(defined, 1.0 - inter / safe, 0.0).mean()

    def backward(grad: Array) -> tuple[Array]:
        i = _expand(inter, x.ndim)
        u = _expand(safe, x.ndim)
        dp = -(w * g * u - i * w * (1.0 - g)) / (u * u)
        return (np.where(_expand(defined, x.ndim), grad * dp * p * (1.0 - p) / batch, 0.0),)

    return track("weighted_iou", (pred,), np.asarray(value, dtype=x.dtype), backward)


def structure_loss(pred: Tensor, mask: npt.ArrayLike, weights: npt.ArrayLike | None = None) -> Tensor:
    """Weighted IoU plus weighted BCE for one map."""
    w = loss_weights(mask) if weights is None else weights
    return add(weighted_iou(pred, mask, w), weighted_bce(pred, mask, w))


def total_loss(outputs: t.Sequence[Tensor], mask: npt.ArrayLike) -> Tensor:
    """Deep supervision: sum of `structure_loss` over every input-resolution
    side output, with the weight map computed once from the mask.

    Args:
        outputs: Logit maps at mask resolution, typically
            `SideOutputs.upsampled` (C_6, C_5, C_4, C_3).
        mask: Binary ground truth, same shape as every output.

    Raises:
        ValidationError: When no outputs are given.
    """
    if not outputs:
        raise ValidationError(reason="total_loss needs at least one side output")
    w = loss_weights(mask)
    total = structure_loss(outputs[0], mask, w)
    for out in outputs[1:]:
        total = add(total, structure_loss(out, mask, w))
    return total
