from __future__ import annotations

import typing as t

import numpy as np

from codbench.lib.tensor import Array
from codbench.lib.tensor import ConvSpec
from codbench.lib.tensor import Tensor
from codbench.lib.tensor import batchnorm
from codbench.lib.tensor import conv2d
from codbench.lib.tensor import relu
from codbench.lib.tensor import runtime

if t.TYPE_CHECKING:
    from codbench.config.model.backbone import BackboneConfig
    from codbench.config.model.sinet import SinetConfig


def param_names(name: str, spec: ConvSpec) -> list[str]:
    """Learnable tensor names of one conv unit."""
    if spec.has_batchnorm:
        return [f"{name}.conv.weight", f"{name}.bn.gamma", f"{name}.bn.beta"]
    return [f"{name}.conv.weight", f"{name}.conv.bias"]


def buffer_names(name: str, spec: ConvSpec) -> list[str]:
    if spec.has_batchnorm:
        return [f"{name}.bn.running_mean", f"{name}.bn.running_var"]
    return []


class SinetParams:
    """Learnable tensors and batch-norm buffers of the whole network.

    Parameters are grouped in conv units, each a convolution optionally
    followed by batch norm. Unit names are dotted paths such as
    `tem4.b2.1` or `gra3.0.v`; tensors are named
    `<unit>.conv.weight`, `<unit>.conv.bias`, `<unit>.bn.gamma` and
    `<unit>.bn.beta`, buffers `<unit>.bn.running_mean` and
    `<unit>.bn.running_var`.

    Instances are treated as frozen values: `replace` returns a copy.

    Attributes:
        sinet: Architecture configuration the layout was built from.
        backbone: Pyramid configuration the layout was built from.
        specs: Conv unit geometry by unit name, in forward order.
        tensors: Parameter leaves by name.
        buffers: Batch-norm running statistics by name.
    """

    __slots__ = ("backbone", "buffers", "sinet", "specs", "tensors")

    def __init__(
        self,
        *,
        sinet: SinetConfig,
        backbone: BackboneConfig,
        specs: t.Mapping[str, ConvSpec],
        tensors: t.Mapping[str, Tensor],
        buffers: t.Mapping[str, Array],
    ) -> None:
        self.sinet = sinet
        self.backbone = backbone
        self.specs = dict(specs)
        self.tensors = dict(tensors)
        self.buffers = dict(buffers)

    @classmethod
    def initialize(
        cls,
        specs: t.Mapping[str, ConvSpec],
        *,
        sinet: SinetConfig,
        backbone: BackboneConfig,
        seed: int,
    ) -> SinetParams:
        """He-normal conv weights from a seeded generator, zero biases,
        identity batch norm."""
        rng = np.random.default_rng(seed)
        dtype = runtime.dtype()
        tensors: dict[str, Tensor] = {}
        buffers: dict[str, Array] = {}
        for name, spec in specs.items():
            fan_in = spec.in_channels * spec.kernel_h * spec.kernel_w
            weight = rng.standard_normal(spec.weight_shape) * np.sqrt(2.0 / fan_in)
            tensors[f"{name}.conv.weight"] = Tensor.parameter(weight, name=f"{name}.conv.weight")
            if spec.has_batchnorm:
                c = spec.out_channels
                tensors[f"{name}.bn.gamma"] = Tensor.parameter(np.ones(c), name=f"{name}.bn.gamma")
                tensors[f"{name}.bn.beta"] = Tensor.parameter(np.zeros(c), name=f"{name}.bn.beta")
                buffers[f"{name}.bn.running_mean"] = np.zeros(c, dtype=dtype)
                buffers[f"{name}.bn.running_var"] = np.ones(c, dtype=dtype)
            else:
                tensors[f"{name}.conv.bias"] = Tensor.parameter(
                    np.zeros(spec.out_channels), name=f"{name}.conv.bias"
                )
        return cls(sinet=sinet, backbone=backbone, specs=specs, tensors=tensors, buffers=buffers)

    def parameters(self) -> list[Tensor]:
        return list(self.tensors.values())

    def num_parameters(self) -> int:
        return sum(p.size for p in self.tensors.values())

    def replace(
        self,
        *,
        tensors: t.Mapping[str, Tensor] | None = None,
        buffers: t.Mapping[str, Array] | None = None,
    ) -> SinetParams:
        """Copy with some tensors and/or buffers swapped out."""
        return SinetParams(
            sinet=self.sinet,
            backbone=self.backbone,
            specs=self.specs,
            tensors={**self.tensors, **(tensors or {})},
            buffers={**self.buffers, **(buffers or {})},
        )

    def with_arrays(self, arrays: t.Mapping[str, Array]) -> SinetParams:
        """Copy whose named parameters are rebuilt from plain arrays."""
        return self.replace(
            tensors={name: Tensor.parameter(arr, name=name) for name, arr in arrays.items()}
        )

    def __repr__(self) -> str:
        return (
            f"SinetParams(variant={self.sinet.label!r}, units={len(self.specs)}, "
            f"parameters={self.num_parameters()})"
        )


class Layers:
    """Applies conv units of a `SinetParams` during one forward pass and
    collects the batch-norm statistics it produces."""

    def __init__(self, params: SinetParams, *, training: bool = False) -> None:
        self.params = params
        self.training = training
        self.buffers = dict(params.buffers)

    def __call__(self, name: str, x: Tensor, *, activate: bool = False) -> Tensor:
        spec = self.params.specs[name]
        tensors = self.params.tensors
        y = conv2d(x, spec, tensors[f"{name}.conv.weight"], tensors.get(f"{name}.conv.bias"))
        if spec.has_batchnorm:
            mean_key, var_key = buffer_names(name, spec)
            result = batchnorm(
                y,
                tensors[f"{name}.bn.gamma"],
                tensors[f"{name}.bn.beta"],
                self.buffers[mean_key],
                self.buffers[var_key],
                eps=self.params.sinet.bn_eps,
                momentum=self.params.sinet.bn_momentum,
                training=self.training,
            )
            y = result.y
            if self.training:
                self.buffers[mean_key] = result.running_mean
                self.buffers[var_key] = result.running_var
        return relu(y) if activate else y
