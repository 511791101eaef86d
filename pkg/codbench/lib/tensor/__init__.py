"""Dense tensors with a reverse-mode tape, limited to the op set the
SINet graph needs."""

from __future__ import annotations

from codbench.lib.tensor import runtime
from codbench.lib.tensor.core import Array
from codbench.lib.tensor.core import Gradients
from codbench.lib.tensor.core import Tape
from codbench.lib.tensor.core import Tensor
from codbench.lib.tensor.core import active_tape
from codbench.lib.tensor.core import backward
from codbench.lib.tensor.core import track
from codbench.lib.tensor.exceptions import NonFiniteError
from codbench.lib.tensor.exceptions import ShapeError
from codbench.lib.tensor.exceptions import TapeError
from codbench.lib.tensor.ops import BatchNormResult
from codbench.lib.tensor.ops import ConvSpec
from codbench.lib.tensor.ops import add
from codbench.lib.tensor.ops import affine
from codbench.lib.tensor.ops import batchnorm
from codbench.lib.tensor.ops import concat_channels
from codbench.lib.tensor.ops import conv2d
from codbench.lib.tensor.ops import downsample
from codbench.lib.tensor.ops import mul
from codbench.lib.tensor.ops import relu
from codbench.lib.tensor.ops import resize_bilinear
from codbench.lib.tensor.ops import sigmoid
from codbench.lib.tensor.ops import split_channels
from codbench.lib.tensor.ops import sum_all
from codbench.lib.tensor.ops import upsample_bilinear

__all__ = [
    "Array",
    "BatchNormResult",
    "ConvSpec",
    "Gradients",
    "NonFiniteError",
    "ShapeError",
    "Tape",
    "TapeError",
    "Tensor",
    "active_tape",
    "add",
    "affine",
    "backward",
    "batchnorm",
    "concat_channels",
    "conv2d",
    "downsample",
    "mul",
    "relu",
    "resize_bilinear",
    "runtime",
    "sigmoid",
    "split_channels",
    "sum_all",
    "track",
    "upsample_bilinear",
]
