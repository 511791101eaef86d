"""Search and identification phases of the segmentation network.

The search phase enhances the three deepest pyramid levels with
texture-enhanced modules (TEM) and aggregates them into a coarse map
C_6 with the neighbor connection decoder (NCD). The identification
phase refines the map level by level (k = 5, 4, 3) with three
group-reversal attention (GRA) blocks each, producing C_5, C_4, C_3.
"""

from __future__ import annotations

import typing as t

from codbench.config.model.backbone import BackboneConfig
from codbench.config.model.sinet import SinetConfig
from codbench.exceptions import ValidationError
from codbench.lib.nn.backbone import backbone_layout
from codbench.lib.nn.backbone import pyramid_forward
from codbench.lib.nn.params import Layers
from codbench.lib.nn.params import SinetParams
from codbench.lib.tensor import Array
from codbench.lib.tensor import ConvSpec
from codbench.lib.tensor import ShapeError
from codbench.lib.tensor import Tensor
from codbench.lib.tensor import add
from codbench.lib.tensor import affine
from codbench.lib.tensor import concat_channels
from codbench.lib.tensor import downsample
from codbench.lib.tensor import mul
from codbench.lib.tensor import relu
from codbench.lib.tensor import resize_bilinear
from codbench.lib.tensor import sigmoid
from codbench.lib.tensor import split_channels
from codbench.lib.tensor import upsample_bilinear

LEVELS = (3, 4, 5)
GRA_DEPTH = 3


class SideOutputs(t.NamedTuple):
    """Single-channel logit maps and their input-resolution versions.

    C_6 and C_3 have stride 8, C_4 stride 16, C_5 stride 32.
    """

    c6: Tensor
    c5: Tensor
    c4: Tensor
    c3: Tensor
    c6_up: Tensor
    c5_up: Tensor
    c4_up: Tensor
    c3_up: Tensor
    buffers: dict[str, Array]

    @property
    def upsampled(self) -> tuple[Tensor, Tensor, Tensor, Tensor]:
        return self.c6_up, self.c5_up, self.c4_up, self.c3_up


# ============================================================================
# Layout
# ============================================================================


def tem_layout(prefix: str, in_channels: int, config: SinetConfig) -> dict[str, ConvSpec]:
    c = config.channels
    specs: dict[str, ConvSpec] = {}
    if config.tem_style != "none":
        for b, d in enumerate(config.dilations):
            specs[f"{prefix}.b{b}.0"] = ConvSpec.same(in_channels, c, 1)
            if b == 0:
                continue
            if config.tem_style == "asymmetric":
                specs[f"{prefix}.b{b}.1"] = ConvSpec.same(c, c, (d, 1))
                specs[f"{prefix}.b{b}.2"] = ConvSpec.same(c, c, (1, d))
            else:
                specs[f"{prefix}.b{b}.1"] = ConvSpec.same(c, c, d)
            specs[f"{prefix}.b{b}.3"] = ConvSpec.same(c, c, 3, dilation=d)
        specs[f"{prefix}.cat"] = ConvSpec.same(len(config.dilations) * c, c, 3)
    specs[f"{prefix}.res"] = ConvSpec.same(in_channels, c, 1)
    return specs


def ncd_layout(config: SinetConfig) -> dict[str, ConvSpec]:
    c = config.channels
    specs: dict[str, ConvSpec] = {}
    if config.decoder != "none":
        for u in (1, 2, 3):
            specs[f"ncd.g{u}"] = ConvSpec.same(c, c, 3)
    specs["ncd.head1"] = ConvSpec.same(2 * c, c, 3)
    specs["ncd.head2"] = ConvSpec.same(2 * c, c, 3)
    specs["ncd.out"] = ConvSpec.same(c, 1, 3, has_batchnorm=False)
    return specs


def gra_layout(prefix: str, config: SinetConfig) -> dict[str, ConvSpec]:
    c = config.channels
    specs: dict[str, ConvSpec] = {}
    for i, g in enumerate(config.groups):
        specs[f"{prefix}.{i}.v"] = ConvSpec.same(c + c // g, c, 3)
        specs[f"{prefix}.{i}.w"] = ConvSpec.same(c, 1, 3, has_batchnorm=False)
    return specs


def sinet_layout(config: SinetConfig, backbone: BackboneConfig) -> dict[str, ConvSpec]:
    """Every conv unit of the network, in forward order."""
    specs = backbone_layout(backbone)
    widths = backbone.level_channels
    for k in LEVELS:
        specs.update(tem_layout(f"tem{k}", widths[k - 1], config))
    specs.update(ncd_layout(config))
    for k in reversed(LEVELS):
        specs.update(gra_layout(f"gra{k}", config))
    return specs


def init_sinet_params(
    config: SinetConfig | None = None,
    backbone: BackboneConfig | None = None,
    *,
    seed: int | None = None,
) -> SinetParams:
    """Freshly initialized parameters; `seed` defaults to the backbone seed."""
    config = config or SinetConfig()
    backbone = backbone or BackboneConfig()
    return SinetParams.initialize(
        sinet_layout(config, backbone),
        sinet=config,
        backbone=backbone,
        seed=backbone.seed if seed is None else seed,
    )


# ============================================================================
# Search phase
# ============================================================================


def tem(f: Tensor, layers: Layers, prefix: str) -> Tensor:
    """Texture-enhanced module: parallel dilated branches, concatenated,
    reduced to C channels and added to a 1x1 shortcut, then ReLU.

    Raises:
        ShapeError: When the input width differs from the unit layout.
    """
    config = layers.params.sinet
    specs = layers.params.specs
    expected = specs[f"{prefix}.res"].in_channels
    if f.ndim != 4 or f.shape[1] != expected:
        raise ShapeError("tem", dimension="channels", expected=expected, got=f.shape[1:2])

    shortcut = layers(f"{prefix}.res", f)
    if config.tem_style == "none":
        return relu(shortcut)

    branches = []
    for b in range(len(config.dilations)):
        x = layers(f"{prefix}.b{b}.0", f)
        if b:
            for step in (1, 2, 3):
                name = f"{prefix}.b{b}.{step}"
                if name in specs:
                    x = layers(name, x)
        branches.append(x)
    fused = layers(f"{prefix}.cat", concat_channels(branches))
    return relu(add(fused, shortcut))


def _check_level(op: str, x: Tensor, channels: int, size: tuple[int, int]) -> None:
    if x.shape[1] != channels:
        raise ShapeError(op, dimension="channels", expected=channels, got=x.shape[1])
    if x.shape[2:] != size:
        raise ShapeError(op, dimension="spatial size", expected=size, got=x.shape[2:])


def ncd(f3: Tensor, f4: Tensor, f5: Tensor, layers: Layers) -> Tensor:
    """Neighbor connection decoder producing the stride-8 coarse map C_6.

    Refined features:
        f5nc = f5
        f4nc = f4 * g1(up2(f5))
        f3nc = f3 * g2(up2(f4nc)) * g3(up2(f4))

    The partial-decoder variant gates f3 with g2(up4(f5)) instead, and
    decoder "none" passes the features through ungated. The head
    concatenates up2(f5nc) with f4nc, then up2 of that with f3nc, each
    followed by conv-bn-relu, and ends in a 3x3 conv to one channel.

    Raises:
        ShapeError: On inputs that are not at strides 8, 16, 32 of one
            image or do not carry C channels.
    """
    config = layers.params.sinet
    c = config.channels
    h, w = f5.shape[2:]
    _check_level("ncd", f5, c, (h, w))
    _check_level("ncd", f4, c, (2 * h, 2 * w))
    _check_level("ncd", f3, c, (4 * h, 4 * w))

    if config.decoder == "none":
        f4nc, f3nc = f4, f3
    else:
        f4nc = mul(f4, layers("ncd.g1", upsample_bilinear(f5, 2)))
        if config.decoder == "ncd":
            gate = layers("ncd.g2", upsample_bilinear(f4nc, 2))
        else:
            gate = layers("ncd.g2", upsample_bilinear(f5, 4))
        f3nc = mul(mul(f3, gate), layers("ncd.g3", upsample_bilinear(f4, 2)))

    x = layers("ncd.head1", concat_channels([upsample_bilinear(f5, 2), f4nc]), activate=True)
    x = layers("ncd.head2", concat_channels([upsample_bilinear(x, 2), f3nc]), activate=True)
    return layers("ncd.out", x)


# ============================================================================
# Identification phase
# ============================================================================


def reverse_guidance(c_next: Tensor, k: int, *, reverse: bool = True) -> Tensor:
    """Guidance r_1 for level k from the next coarser map.

    C_6 (stride 8) is down-sampled by 4 for k = 5; otherwise the map is
    up-sampled by 2. The result is 1 - sigmoid(resized), or the plain
    sigmoid when `reverse` is off.

    Raises:
        ValidationError: When k is not 3, 4 or 5.
        ShapeError: On a multi-channel map.
    """
    if k not in LEVELS:
        raise ValidationError(reason=f"reverse_guidance: level must be 3, 4 or 5, got {k}")
    if c_next.ndim != 4 or c_next.shape[1] != 1:
        raise ShapeError("reverse_guidance", dimension="channels", expected=1, got=c_next.shape[1:2])
    resized = downsample(c_next, 4) if k == 5 else upsample_bilinear(c_next, 2)
    s = sigmoid(resized)
    return affine(s, -1.0, 1.0) if reverse else s


def group_guidance(p: Tensor, r: Tensor, group_size: int) -> Tensor:
    """Split p into C / group_size channel groups and insert the guidance
    channel after each group, giving C + C / group_size channels."""
    if r.ndim != 4 or r.shape[1] != 1:
        raise ShapeError("group_guidance", dimension="guidance channels", expected=1, got=r.shape[1:2])
    pieces: list[Tensor] = []
    for group in split_channels(p, group_size):
        pieces.extend((group, r))
    return concat_channels(pieces)


def gra_block(
    p: Tensor,
    r: Tensor,
    layers: Layers,
    prefix: str,
    group_size: int,
    reverse_flag: bool = False,
) -> tuple[Tensor, Tensor]:
    """One group-reversal attention step.

    p' = p + conv_v(GGO(p, guidance)) and r' = r + conv_w(p'), where the
    guidance is r, or 1 - sigmoid(r) when `reverse_flag` is set.

    Raises:
        ShapeError: When the channels are not divisible by `group_size`
            or p and r differ in spatial size.
    """
    if p.shape[2:] != r.shape[2:]:
        raise ShapeError("gra_block", dimension="spatial size", expected=p.shape[2:], got=r.shape[2:])
    guidance = affine(sigmoid(r), -1.0, 1.0) if reverse_flag else r
    p_next = add(p, layers(f"{prefix}.v", group_guidance(p, guidance, group_size)))
    r_next = add(r, layers(f"{prefix}.w", p_next))
    return p_next, r_next


def sinet_forward(
    image: Tensor,
    params: SinetParams,
    config: SinetConfig | None = None,
    *,
    training: bool = False,
) -> SideOutputs:
    """Full forward pass.

    Args:
        image: Normalized RGB batch, N x 3 x H x W, H and W divisible by 32.
        params: Network parameters.
        config: Architecture; defaults to the one `params` was built for.
        training: Use batch statistics in batch norm and return updated
            running statistics.

    Returns:
        The side outputs C_6, C_5, C_4, C_3, each also resized to H x W.

    Raises:
        ValidationError: When `config` differs from the parameter layout.
        ShapeError: On an invalid image shape.
    """
    config = config or params.sinet
    if config != params.sinet:
        raise ValidationError(
            reason=f"config {config.label} does not match parameters built for {params.sinet.label}"
        )

    layers = Layers(params, training=training)
    levels = pyramid_forward(image, layers)
    enhanced = {k: tem(levels[k - 1], layers, f"tem{k}") for k in LEVELS}
    c6 = ncd(enhanced[3], enhanced[4], enhanced[5], layers)

    maps: dict[int, Tensor] = {6: c6}
    for k in reversed(LEVELS):
        coarse = maps[k + 1]
        resized = downsample(coarse, 4) if k == 5 else upsample_bilinear(coarse, 2)
        r = reverse_guidance(coarse, k, reverse=bool(config.reverse[0]))
        p = enhanced[k]
        for i, g in enumerate(config.groups):
            p, r = gra_block(p, r, layers, f"gra{k}.{i}", g, reverse_flag=i > 0 and bool(config.reverse[i]))
        maps[k] = add(r, resized)

    size = (image.shape[2], image.shape[3])
    return SideOutputs(
        c6=maps[6],
        c5=maps[5],
        c4=maps[4],
        c3=maps[3],
        c6_up=resize_bilinear(maps[6], size),
        c5_up=resize_bilinear(maps[5], size),
        c4_up=resize_bilinear(maps[4], size),
        c3_up=resize_bilinear(maps[3], size),
        buffers=layers.buffers,
    )
