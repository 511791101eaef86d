"""Forward kernels with analytic backward rules.

Every op is pure: operands are never mutated and the result is a new
`Tensor`. When an operand is tracked and a `Tape` is active the op is
recorded together with a closure computing the operand gradients.
"""

from __future__ import annotations

from dataclasses import dataclass
import functools
import typing as t

import numpy as np
from scipy import special

from codbench.exceptions import ValidationError
from codbench.lib.tensor.core import Array
from codbench.lib.tensor.core import Tensor
from codbench.lib.tensor.core import track
from codbench.lib.tensor.exceptions import ShapeError

# ============================================================================
# Convolution
# ============================================================================


@dataclass(frozen=True, slots=True)
class ConvSpec:
    """Geometry of a 2-D convolution.

    Attributes:
        in_channels: Expected input channels.
        out_channels: Produced channels.
        kernel_h: Kernel height.
        kernel_w: Kernel width; may differ from `kernel_h`.
        dilation: Spacing between kernel taps.
        stride: Step between output positions.
        padding: Zero padding, an int for both axes or `(pad_h, pad_w)`.
        has_batchnorm: Whether the conv is followed by batch norm (and
            therefore carries no bias of its own).
    """

    in_channels: int
    out_channels: int
    kernel_h: int
    kernel_w: int
    dilation: int = 1
    stride: int = 1
    padding: int | tuple[int, int] = 0
    has_batchnorm: bool = False

    def __post_init__(self) -> None:
        if min(self.in_channels, self.out_channels, self.kernel_h, self.kernel_w) < 1:
            raise ValidationError(reason=f"conv channels and kernel sizes must be positive: {self}")
        if self.dilation < 1:
            raise ValidationError(reason=f"dilation must be >= 1, got {self.dilation}")
        if self.stride < 1:
            raise ValidationError(reason=f"stride must be >= 1, got {self.stride}")
        if min(self.pads) < 0:
            raise ValidationError(reason=f"padding must be >= 0, got {self.padding}")

    @classmethod
    def same(
        cls,
        in_channels: int,
        out_channels: int,
        kernel: int | tuple[int, int],
        *,
        dilation: int = 1,
        stride: int = 1,
        has_batchnorm: bool = True,
    ) -> ConvSpec:
        """Spec padded so a stride-1 conv keeps the spatial size."""
        kh, kw = (kernel, kernel) if isinstance(kernel, int) else kernel
        return cls(
            in_channels,
            out_channels,
            kh,
            kw,
            dilation=dilation,
            stride=stride,
            padding=(dilation * (kh - 1) // 2, dilation * (kw - 1) // 2),
            has_batchnorm=has_batchnorm,
        )

    @property
    def pads(self) -> tuple[int, int]:
        if isinstance(self.padding, int):
            return self.padding, self.padding
        return self.padding

    @property
    def weight_shape(self) -> tuple[int, int, int, int]:
        return self.out_channels, self.in_channels, self.kernel_h, self.kernel_w

    def output_size(self, height: int, width: int) -> tuple[int, int]:
        ph, pw = self.pads
        ho = (height + 2 * ph - self.dilation * (self.kernel_h - 1) - 1) // self.stride + 1
        wo = (width + 2 * pw - self.dilation * (self.kernel_w - 1) - 1) // self.stride + 1
        return ho, wo


def _require_rank4(op: str, x: Tensor) -> None:
    if x.ndim != 4:
        raise ShapeError(op, dimension="rank", expected=4, got=x.ndim)


def conv2d(x: Tensor, spec: ConvSpec, weight: Tensor, bias: Tensor | None = None) -> Tensor:
    """2-D cross-correlation via strided im2col and a tensordot.

    Args:
        x: Input of shape N x C_in x H x W.
        spec: Convolution geometry.
        weight: Kernel of shape C_out x C_in x kernel_h x kernel_w.
        bias: Optional per-output-channel bias.

    Returns:
        Output of shape N x C_out x H_out x W_out.

    Raises:
        ShapeError: When the input, weight or bias disagree with `spec`,
            or the padded input is smaller than the dilated kernel.
    """
    _require_rank4("conv2d", x)
    n, c, h, w = x.shape
    if c != spec.in_channels:
        raise ShapeError("conv2d", dimension="channels", expected=spec.in_channels, got=c)
    if weight.shape != spec.weight_shape:
        raise ShapeError("conv2d", dimension="weight", expected=spec.weight_shape, got=weight.shape)
    if bias is not None and bias.shape != (spec.out_channels,):
        raise ShapeError("conv2d", dimension="bias", expected=(spec.out_channels,), got=bias.shape)
    ho, wo = spec.output_size(h, w)
    if ho < 1 or wo < 1:
        raise ShapeError("conv2d", dimension="height" if ho < 1 else "width", expected=">= 1", got=(ho, wo))

    ph, pw = spec.pads
    d, s = spec.dilation, spec.stride
    kh, kw = spec.kernel_h, spec.kernel_w
    xp = np.pad(x.data, ((0, 0), (0, 0), (ph, ph), (pw, pw)))

    windows = [
        (
            slice(i * d, i * d + s * (ho - 1) + 1, s),
            slice(j * d, j * d + s * (wo - 1) + 1, s),
        )
        for i in range(kh)
        for j in range(kw)
    ]
    cols = np.empty((n, c, kh * kw, ho, wo), dtype=xp.dtype)
    for k, (rows, columns) in enumerate(windows):
        cols[:, :, k] = xp[:, :, rows, columns]

    wmat = weight.data.reshape(spec.out_channels, c, kh * kw)
    out = np.tensordot(wmat, cols, axes=([1, 2], [1, 2])).transpose(1, 0, 2, 3)
    if bias is not None:
        out = out + bias.data[None, :, None, None]

    def backward(g: Array) -> tuple[Array, Array, Array | None]:
        gw = np.tensordot(g, cols, axes=([0, 2, 3], [0, 3, 4])).reshape(spec.weight_shape)
        gcols = np.tensordot(wmat, g, axes=([0], [1]))  # C_in x K x N x Ho x Wo
        gxp = np.zeros_like(xp)
        for k, (rows, columns) in enumerate(windows):
            gxp[:, :, rows, columns] += gcols[:, k].transpose(1, 0, 2, 3)
        gx = gxp[:, :, ph : ph + h, pw : pw + w]
        gb = g.sum(axis=(0, 2, 3)) if bias is not None else None
        return gx, gw, gb

    inputs = (x, weight) if bias is None else (x, weight, bias)
    fn = backward if bias is not None else (lambda g: backward(g)[:2])
    return track("conv2d", inputs, out, fn)


# ============================================================================
# Normalization and activations
# ============================================================================


class BatchNormResult(t.NamedTuple):
    y: Tensor
    running_mean: Array
    running_var: Array


def batchnorm(
    x: Tensor,
    gamma: Tensor,
    beta: Tensor,
    running_mean: Array,
    running_var: Array,
    *,
    eps: float = 1e-5,
    momentum: float = 0.1,
    training: bool = False,
) -> BatchNormResult:
    """Per-channel batch normalization.

    In inference mode the running statistics normalize the input. In
    training mode the batch statistics (biased variance) normalize it and
    fresh running statistics are returned, updated with `momentum` and
    the unbiased batch variance. The passed running arrays are left
    untouched in both modes.

    Raises:
        ValidationError: When `eps` is not positive.
        ShapeError: When a per-channel array does not match the channels.
    """
    if eps <= 0:
        raise ValidationError(reason=f"batchnorm eps must be positive, got {eps}")
    _require_rank4("batchnorm", x)
    c = x.shape[1]
    for label, arr in (
        ("gamma", gamma.data),
        ("beta", beta.data),
        ("running_mean", running_mean),
        ("running_var", running_var),
    ):
        if arr.shape != (c,):
            raise ShapeError("batchnorm", dimension=f"{label} length", expected=c, got=arr.shape)

    def bc(v: Array) -> Array:
        return v[None, :, None, None]

    g_, b_ = gamma.data, beta.data
    if not training:
        inv = 1.0 / np.sqrt(running_var + eps)
        xhat = (x.data - bc(running_mean)) * bc(inv)
        out = xhat * bc(g_) + bc(b_)

        def backward_eval(g: Array) -> tuple[Array, Array, Array]:
            return g * bc(g_ * inv), (g * xhat).sum(axis=(0, 2, 3)), g.sum(axis=(0, 2, 3))

        y = track("batchnorm", (x, gamma, beta), out, backward_eval)
        return BatchNormResult(y, np.array(running_mean), np.array(running_var))

    m = x.shape[0] * x.shape[2] * x.shape[3]
    mu = x.data.mean(axis=(0, 2, 3))
    var = x.data.var(axis=(0, 2, 3))
    inv = 1.0 / np.sqrt(var + eps)
    xhat = (x.data - bc(mu)) * bc(inv)
    out = xhat * bc(g_) + bc(b_)

    def backward_train(g: Array) -> tuple[Array, Array, Array]:
        gxhat = g * bc(g_)
        gx = bc(inv / m) * (
            m * gxhat
            - gxhat.sum(axis=(0, 2, 3), keepdims=True)
            - xhat * (gxhat * xhat).sum(axis=(0, 2, 3), keepdims=True)
        )
        return gx, (g * xhat).sum(axis=(0, 2, 3)), g.sum(axis=(0, 2, 3))

    unbiased = var * m / (m - 1) if m > 1 else var
    new_mean = (1.0 - momentum) * running_mean + momentum * mu
    new_var = (1.0 - momentum) * running_var + momentum * unbiased
    y = track("batchnorm", (x, gamma, beta), out, backward_train)
    return BatchNormResult(y, new_mean, new_var)


def relu(x: Tensor) -> Tensor:
    mask = x.data > 0
    return track("relu", (x,), np.where(mask, x.data, 0.0), lambda g: (g * mask,))


def sigmoid(x: Tensor) -> Tensor:
    s = special.expit(x.data)
    return track("sigmoid", (x,), s, lambda g: (g * s * (1.0 - s),))


def affine(x: Tensor, scale: float, shift: float) -> Tensor:
    """Elementwise `scale * x + shift`; `affine(s, -1, 1)` is `1 - s`."""
    return track("affine", (x,), x.data * scale + shift, lambda g: (g * scale,))


# ============================================================================
# Resampling
# ============================================================================


@functools.lru_cache(maxsize=128)
def _interp_matrix(src: int, dst: int, dtype: str) -> Array:
    """Row-stochastic 1-D bilinear resampling matrix, half-pixel centers,
    source coordinates below zero clamped to zero."""
    mat = np.zeros((dst, src), dtype=dtype)
    if src == dst:
        np.fill_diagonal(mat, 1.0)
    else:
        pos = np.maximum((np.arange(dst) + 0.5) * (src / dst) - 0.5, 0.0)
        lo = np.minimum(np.floor(pos).astype(np.intp), src - 1)
        hi = np.minimum(lo + 1, src - 1)
        frac = pos - lo
        rows = np.arange(dst)
        np.add.at(mat, (rows, lo), 1.0 - frac)
        np.add.at(mat, (rows, hi), frac)
    mat.setflags(write=False)
    return mat


def resize_bilinear(x: Tensor, size: tuple[int, int]) -> Tensor:
    """Bilinear resize to `size = (height, width)` with the
    align-corners=False convention, as separable matrix products."""
    _require_rank4("resize_bilinear", x)
    ho, wo = size
    if ho < 1 or wo < 1:
        raise ShapeError("resize_bilinear", dimension="size", expected=">= 1", got=size)
    h, w = x.shape[2:]
    ry = _interp_matrix(h, ho, x.dtype.str)
    rx = _interp_matrix(w, wo, x.dtype.str)
    out = ry @ (x.data @ rx.T)
    return track("resize_bilinear", (x,), out, lambda g: (ry.T @ (g @ rx),))


def _check_factor(op: str, factor: int) -> None:
    if factor not in (2, 4):
        raise ValidationError(reason=f"{op}: factor must be 2 or 4, got {factor}")


def upsample_bilinear(x: Tensor, factor: int) -> Tensor:
    _check_factor("upsample_bilinear", factor)
    _require_rank4("upsample_bilinear", x)
    return resize_bilinear(x, (x.shape[2] * factor, x.shape[3] * factor))


def downsample(x: Tensor, factor: int) -> Tensor:
    """Bilinear down-sampling by an integer factor.

    Raises:
        ShapeError: When height or width is not divisible by `factor`.
    """
    _check_factor("downsample", factor)
    _require_rank4("downsample", x)
    h, w = x.shape[2:]
    for label, size in (("height", h), ("width", w)):
        if size % factor:
            raise ShapeError("downsample", dimension=label, expected=f"multiple of {factor}", got=size)
    return resize_bilinear(x, (h // factor, w // factor))


# ============================================================================
# Elementwise and channel ops
# ============================================================================


def _same_shape(op: str, a: Tensor, b: Tensor) -> None:
    if a.shape != b.shape:
        labels = ("batch", "channels", "height", "width")
        dim = "rank"
        if a.ndim == b.ndim:
            dim = next(
                (labels[i] if a.ndim == 4 else f"axis {i}")
                for i, (p, q) in enumerate(zip(a.shape, b.shape, strict=True))
                if p != q
            )
        raise ShapeError(op, dimension=dim, expected=a.shape, got=b.shape)


def mul(a: Tensor, b: Tensor) -> Tensor:
    _same_shape("mul", a, b)
    da, db = a.data, b.data
    # overflow surfaces as NonFiniteError under debug checks
    with np.errstate(over="ignore"):
        out = da * db
    return track("mul", (a, b), out, lambda g: (g * db, g * da))


def add(a: Tensor, b: Tensor) -> Tensor:
    _same_shape("add", a, b)
    return track("add", (a, b), a.data + b.data, lambda g: (g, g))


def concat_channels(xs: t.Sequence[Tensor]) -> Tensor:
    """Concatenate along the channel axis.

    Raises:
        ShapeError: When the operands differ in batch or spatial size.
    """
    if not xs:
        raise ValidationError(reason="concat_channels needs at least one tensor")
    head = xs[0]
    _require_rank4("concat_channels", head)
    for other in xs[1:]:
        _require_rank4("concat_channels", other)
        for axis, label in ((0, "batch"), (2, "height"), (3, "width")):
            if other.shape[axis] != head.shape[axis]:
                raise ShapeError("concat_channels", dimension=label, expected=head.shape[axis], got=other.shape[axis])

    bounds = np.cumsum([x.shape[1] for x in xs])[:-1]
    out = np.concatenate([x.data for x in xs], axis=1)
    return track("concat_channels", tuple(xs), out, lambda g: tuple(np.split(g, bounds, axis=1)))


def split_channels(x: Tensor, group_size: int) -> list[Tensor]:
    """Split into `C / group_size` consecutive channel groups.

    Raises:
        ShapeError: When the channels are not divisible by `group_size`.
    """
    _require_rank4("split_channels", x)
    c = x.shape[1]
    if group_size < 1 or c % group_size:
        raise ShapeError("split_channels", dimension="channels", expected=f"multiple of {group_size}", got=c)

    def piece(start: int) -> Tensor:
        stop = start + group_size

        def backward(g: Array) -> tuple[Array]:
            full = np.zeros(x.shape, dtype=g.dtype)
            full[:, start:stop] = g
            return (full,)

        return track("split_channels", (x,), x.data[:, start:stop], backward)

    return [piece(start) for start in range(0, c, group_size)]


def sum_all(x: Tensor) -> Tensor:
    """Sum of every element as a rank-0 tensor."""
    return track("sum_all", (x,), np.asarray(x.data.sum()), lambda g: (np.full(x.shape, g, dtype=x.dtype),))
