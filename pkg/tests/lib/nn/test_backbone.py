from __future__ import annotations

import numpy as np
import pytest

from codbench.config.model.backbone import BackboneConfig
from codbench.lib.nn import extract_pyramid
from codbench.lib.nn import init_backbone_params
from codbench.lib.tensor import ShapeError
from codbench.lib.tensor import Tensor


class TestFeaturePyramid:
    """Test the strided pyramid standing in for the backbone."""

    @pytest.fixture
    def backbone(self, tiny_backbone):
        return tiny_backbone

    def test_level_shapes(self, backbone, rng):
        """Test strides 2 to 32 and the configured widths on a 64 input."""
        params = init_backbone_params(backbone)
        pyramid = extract_pyramid(Tensor(rng.standard_normal((2, 3, 64, 64))), backbone, params)
        sizes = [pyramid.level(k).shape for k in range(1, 6)]
        widths = backbone.level_channels
        assert sizes == [(2, widths[k], 64 >> (k + 1), 64 >> (k + 1)) for k in range(5)]

    def test_deterministic(self, backbone, rng):
        """Test that equal seeds give identical parameters and features."""
        image = Tensor(rng.standard_normal((1, 3, 32, 32)))
        first = extract_pyramid(image, backbone, init_backbone_params(backbone))
        second = extract_pyramid(image, backbone, init_backbone_params(backbone))
        for a, b in zip(first.levels, second.levels, strict=True):
            np.testing.assert_array_equal(a.data, b.data)

    def test_seed_changes_weights(self, backbone):
        other = BackboneConfig.model_validate({**backbone.model_dump(), "seed": 1})
        a = init_backbone_params(backbone).tensors["backbone.stem.conv.weight"].data
        b = init_backbone_params(other).tensors["backbone.stem.conv.weight"].data
        assert not np.array_equal(a, b)

    def test_training_updates_buffers(self, backbone, rng):
        params = init_backbone_params(backbone)
        pyramid = extract_pyramid(Tensor(rng.standard_normal((2, 3, 32, 32))), backbone, params, training=True)
        assert not np.array_equal(pyramid.buffers["backbone.stem.bn.running_mean"], params.buffers["backbone.stem.bn.running_mean"])

    @pytest.mark.parametrize("shape", [(1, 3, 48, 64), (1, 1, 64, 64), (3, 64, 64)])
    def test_rejects_bad_input(self, backbone, shape):
        """Test that sizes not divisible by 32, non-RGB and unbatched
        inputs are rejected."""
        with pytest.raises(ShapeError):
            extract_pyramid(Tensor(np.zeros(shape)), backbone, init_backbone_params(backbone))

    def test_rejects_other_widths(self, backbone):
        other = BackboneConfig(stem_channels=5, stage_channels=(6, 8, 8, 12))
        with pytest.raises(ShapeError):
            extract_pyramid(Tensor(np.zeros((1, 3, 32, 32))), other, init_backbone_params(backbone))
