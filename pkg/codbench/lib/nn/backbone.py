from __future__ import annotations

import typing as t

from codbench.config.model.sinet import SinetConfig
from codbench.lib.nn.params import Layers
from codbench.lib.nn.params import SinetParams
from codbench.lib.tensor import Array
from codbench.lib.tensor import ConvSpec
from codbench.lib.tensor import ShapeError
from codbench.lib.tensor import Tensor

if t.TYPE_CHECKING:
    from codbench.config.model.backbone import BackboneConfig

STRIDE = 32


class FeaturePyramid(t.NamedTuple):
    """Levels f_1..f_5; level k has stride 2^k."""

    levels: tuple[Tensor, Tensor, Tensor, Tensor, Tensor]
    buffers: dict[str, Array]

    def level(self, k: int) -> Tensor:
        return self.levels[k - 1]


def backbone_layout(config: BackboneConfig) -> dict[str, ConvSpec]:
    """Stem (stride 2) then four stages, each a stride-2 conv-bn-relu
    followed by a stride-1 conv-bn-relu."""
    specs = {"backbone.stem": ConvSpec(3, config.stem_channels, 3, 3, stride=2, padding=1, has_batchnorm=True)}
    prev = config.stem_channels
    for s, width in enumerate(config.stage_channels, start=1):
        specs[f"backbone.stage{s}.0"] = ConvSpec(prev, width, 3, 3, stride=2, padding=1, has_batchnorm=True)
        specs[f"backbone.stage{s}.1"] = ConvSpec.same(width, width, 3)
        prev = width
    return specs


def init_backbone_params(config: BackboneConfig, sinet: SinetConfig | None = None) -> SinetParams:
    """Parameters of the pyramid alone."""
    return SinetParams.initialize(
        backbone_layout(config),
        sinet=sinet or SinetConfig(),
        backbone=config,
        seed=config.seed,
    )


def check_input(image: Tensor, op: str = "extract_pyramid") -> None:
    if image.ndim != 4:
        raise ShapeError(op, dimension="rank", expected=4, got=image.ndim)
    if image.shape[1] != 3:
        raise ShapeError(op, dimension="channels", expected=3, got=image.shape[1])
    for label, size in (("height", image.shape[2]), ("width", image.shape[3])):
        if size % STRIDE:
            raise ShapeError(op, dimension=label, expected=f"multiple of {STRIDE}", got=size)


def pyramid_forward(image: Tensor, layers: Layers) -> tuple[Tensor, Tensor, Tensor, Tensor, Tensor]:
    check_input(image)
    f1 = layers("backbone.stem", image, activate=True)
    levels = [f1]
    x = f1
    for s in range(1, 5):
        x = layers(f"backbone.stage{s}.0", x, activate=True)
        x = layers(f"backbone.stage{s}.1", x, activate=True)
        levels.append(x)
    return levels[0], levels[1], levels[2], levels[3], levels[4]


def extract_pyramid(
    image: Tensor,
    config: BackboneConfig,
    params: SinetParams,
    *,
    training: bool = False,
) -> FeaturePyramid:
    """Five-level feature pyramid of an N x 3 x H x W image.

    Args:
        image: Normalized RGB batch; H and W divisible by 32.
        config: Pyramid widths; must match the ones `params` was built with.
        params: Parameters holding the `backbone.*` units.
        training: Use batch statistics and return updated buffers.

    Returns:
        Levels f_1..f_5 at strides 2, 4, 8, 16, 32.

    Raises:
        ShapeError: On a non-RGB input or indivisible spatial size.
    """
    if config.level_channels != params.backbone.level_channels:
        raise ShapeError(
            "extract_pyramid",
            dimension="level channels",
            expected=params.backbone.level_channels,
            got=config.level_channels,
        )
    layers = Layers(params, training=training)
    levels = pyramid_forward(image, layers)
    return FeaturePyramid(levels, layers.buffers)
