from __future__ import annotations

from hypothesis import given
from hypothesis import settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp
import numpy as np
import pytest

from codbench.exceptions import ValidationError
from codbench.lib.tensor import ConvSpec
from codbench.lib.tensor import ShapeError
from codbench.lib.tensor import Tensor
from codbench.lib.tensor import add
from codbench.lib.tensor import affine
from codbench.lib.tensor import batchnorm
from codbench.lib.tensor import concat_channels
from codbench.lib.tensor import conv2d
from codbench.lib.tensor import downsample
from codbench.lib.tensor import mul
from codbench.lib.tensor import relu
from codbench.lib.tensor import resize_bilinear
from codbench.lib.tensor import sigmoid
from codbench.lib.tensor import split_channels
from codbench.lib.tensor import sum_all
from codbench.lib.tensor import upsample_bilinear


def loop_conv(x, w, b, *, dilation, stride, pad):
    """Direct nested-loop cross-correlation."""
    n, c, h, wd = x.shape
    co, _, kh, kw = w.shape
    ph, pw = pad
    xp = np.pad(x, ((0, 0), (0, 0), (ph, ph), (pw, pw)))
    ho = (h + 2 * ph - dilation * (kh - 1) - 1) // stride + 1
    wo = (wd + 2 * pw - dilation * (kw - 1) - 1) // stride + 1
    out = np.zeros((n, co, ho, wo))
    for b_ in range(n):
        for o in range(co):
            for i in range(ho):
                for j in range(wo):
                    acc = 0.0
                    for ci in range(c):
                        for a in range(kh):
                            for e in range(kw):
                                acc += w[o, ci, a, e] * xp[b_, ci, i * stride + a * dilation, j * stride + e * dilation]
                    out[b_, o, i, j] = acc + (b[o] if b is not None else 0.0)
    return out


def weighted_sum(out, weights):
    return sum_all(mul(out, Tensor(weights)))


class TestConv2d:
    """Test the convolution kernel."""

    def test_identity_kernel(self, rng):
        """Test that a centred delta kernel copies the input."""
        x = rng.standard_normal((1, 1, 5, 5))
        w = np.zeros((1, 1, 3, 3))
        w[0, 0, 1, 1] = 1.0
        out = conv2d(Tensor(x), ConvSpec.same(1, 1, 3, has_batchnorm=False), Tensor(w))
        np.testing.assert_allclose(out.data, x)

    def test_zero_kernel(self, rng):
        """Test that a zero kernel yields the bias everywhere."""
        x = rng.standard_normal((2, 3, 6, 6))
        spec = ConvSpec.same(3, 2, 3, has_batchnorm=False)
        out = conv2d(Tensor(x), spec, Tensor(np.zeros(spec.weight_shape)), Tensor(np.array([0.5, -1.0])))
        np.testing.assert_allclose(out.data[:, 0], 0.5)
        np.testing.assert_allclose(out.data[:, 1], -1.0)

    @pytest.mark.parametrize(
        ("kernel", "dilation", "stride", "pad"),
        [
            ((3, 3), 1, 1, (1, 1)),
            ((3, 3), 3, 1, (3, 3)),
            ((5, 1), 1, 1, (2, 0)),
            ((1, 7), 2, 1, (0, 6)),
            ((3, 3), 1, 2, (1, 1)),
        ],
    )
    def test_matches_loop(self, rng, kernel, dilation, stride, pad):
        """Test agreement with the direct loop for several geometries."""
        x = rng.standard_normal((2, 2, 9, 8))
        spec = ConvSpec(2, 3, *kernel, dilation=dilation, stride=stride, padding=pad)
        w = rng.standard_normal(spec.weight_shape)
        b = rng.standard_normal(3)
        out = conv2d(Tensor(x), spec, Tensor(w), Tensor(b))
        np.testing.assert_allclose(out.data, loop_conv(x, w, b, dilation=dilation, stride=stride, pad=pad), atol=1e-12)
        assert out.shape[2:] == spec.output_size(9, 8)

    def test_same_padding_keeps_size(self):
        """Test that `same` specs keep the spatial size for every rate."""
        for d in (1, 3, 5, 7):
            spec = ConvSpec.same(1, 1, 3, dilation=d)
            assert spec.output_size(11, 11) == (11, 11)
            assert ConvSpec.same(1, 1, (d, 1)).output_size(11, 11) == (11, 11)

    def test_channel_mismatch(self, rng):
        spec = ConvSpec.same(3, 1, 3)
        with pytest.raises(ShapeError):
            conv2d(Tensor(rng.standard_normal((1, 2, 4, 4))), spec, Tensor(np.zeros(spec.weight_shape)))

    def test_kernel_larger_than_input(self):
        """Test that an output smaller than one pixel is rejected."""
        spec = ConvSpec(1, 1, 3, 3, dilation=3)
        with pytest.raises(ShapeError):
            conv2d(Tensor(np.zeros((1, 1, 4, 4))), spec, Tensor(np.zeros(spec.weight_shape)))

    def test_invalid_spec(self):
        with pytest.raises(ValidationError):
            ConvSpec(1, 1, 3, 3, dilation=0)

    def test_gradient(self, rng, gradcheck):
        """Test conv gradients against central differences."""
        spec = ConvSpec(2, 2, 3, 3, dilation=2, padding=2)
        weights = rng.standard_normal((1, 2, 6, 6))
        err = gradcheck(
            lambda x, w, b: weighted_sum(conv2d(x, spec, w, b), weights),
            [rng.standard_normal((1, 2, 6, 6)), rng.standard_normal(spec.weight_shape), rng.standard_normal(2)],
        )
        assert err < 1e-6

    def test_strided_gradient(self, rng, gradcheck):
        spec = ConvSpec(1, 2, 3, 3, stride=2, padding=1)
        weights = rng.standard_normal((1, 2, 4, 4))
        err = gradcheck(
            lambda x, w: weighted_sum(conv2d(x, spec, w), weights),
            [rng.standard_normal((1, 1, 8, 8)), rng.standard_normal(spec.weight_shape)],
        )
        assert err < 1e-6


class TestBatchNorm:
    """Test batch normalization in both modes."""

    def test_inference_identity(self, rng):
        """Test that unit statistics and affine leave the input nearly
        unchanged."""
        x = rng.standard_normal((2, 3, 4, 4))
        res = batchnorm(Tensor(x), Tensor(np.ones(3)), Tensor(np.zeros(3)), np.zeros(3), np.ones(3))
        np.testing.assert_allclose(res.y.data, x / np.sqrt(1.0 + 1e-5))

    def test_training_normalizes(self, rng):
        """Test zero mean and unit variance per channel in training mode."""
        x = rng.standard_normal((4, 2, 5, 5)) * 3.0 + 7.0
        res = batchnorm(Tensor(x), Tensor(np.ones(2)), Tensor(np.zeros(2)), np.zeros(2), np.ones(2), training=True)
        np.testing.assert_allclose(res.y.data.mean(axis=(0, 2, 3)), 0.0, atol=1e-12)
        np.testing.assert_allclose(res.y.data.var(axis=(0, 2, 3)), 1.0, atol=1e-5)

    def test_running_stats_update(self, rng):
        """Test the momentum update with the unbiased batch variance."""
        x = rng.standard_normal((2, 1, 3, 3)) + 2.0
        mean, var = np.zeros(1), np.ones(1)
        res = batchnorm(Tensor(x), Tensor(np.ones(1)), Tensor(np.zeros(1)), mean, var, momentum=0.1, training=True)
        np.testing.assert_allclose(res.running_mean, 0.1 * x.mean())
        np.testing.assert_allclose(res.running_var, 0.9 + 0.1 * x.var(ddof=1))
        np.testing.assert_array_equal(mean, [0.0])
        np.testing.assert_array_equal(var, [1.0])

    def test_rejects_non_positive_eps(self):
        with pytest.raises(ValidationError):
            batchnorm(Tensor(np.zeros((1, 1, 2, 2))), Tensor(np.ones(1)), Tensor(np.zeros(1)), np.zeros(1), np.ones(1), eps=0.0)

    def test_channel_mismatch(self):
        with pytest.raises(ShapeError):
            batchnorm(Tensor(np.zeros((1, 2, 2, 2))), Tensor(np.ones(1)), Tensor(np.zeros(1)), np.zeros(1), np.ones(1))

    @pytest.mark.parametrize("training", [False, True])
    def test_gradient(self, rng, gradcheck, training):
        weights = rng.standard_normal((2, 3, 3, 3))
        running = (rng.standard_normal(3), rng.uniform(0.5, 2.0, 3))
        err = gradcheck(
            lambda x, g, b: weighted_sum(batchnorm(x, g, b, *running, training=training).y, weights),
            [rng.standard_normal((2, 3, 3, 3)), rng.uniform(0.5, 1.5, 3), rng.standard_normal(3)],
        )
        assert err < 1e-6


class TestActivations:
    """Test elementwise ops."""

    def test_relu(self):
        out = relu(Tensor(np.array([[[[-1.0, 0.0, 2.0]]]])))
        np.testing.assert_array_equal(out.data, [[[[0.0, 0.0, 2.0]]]])

    def test_sigmoid(self):
        out = sigmoid(Tensor(np.array([0.0, 40.0, -40.0])))
        np.testing.assert_allclose(out.data, [0.5, 1.0, 0.0], atol=1e-15)

    @given(hnp.arrays(np.float64, (1, 1, 3, 4), elements=st.floats(-30.0, 30.0)))
    def test_reverse_complements_sigmoid(self, x):
        """Test that 1 - sigmoid and sigmoid sum to one."""
        s = sigmoid(Tensor(x))
        np.testing.assert_allclose(affine(s, -1.0, 1.0).data + s.data, 1.0, atol=1e-12)

    def test_gradients(self, rng, gradcheck):
        # keep relu inputs away from the kink
        x = rng.standard_normal((1, 2, 3, 3))
        x = np.where(np.abs(x) < 0.1, 0.5, x)
        weights = rng.standard_normal((1, 2, 3, 3))
        assert gradcheck(lambda a: weighted_sum(relu(a), weights), [x]) < 1e-6
        assert gradcheck(lambda a: weighted_sum(sigmoid(a), weights), [x]) < 1e-6
        assert gradcheck(lambda a: weighted_sum(affine(a, -2.0, 1.0), weights), [x]) < 1e-6
        assert gradcheck(lambda a, b: weighted_sum(mul(a, b), weights), [x, rng.standard_normal(x.shape)]) < 1e-6

    def test_mismatched_add(self):
        with pytest.raises(ShapeError) as info:
            add(Tensor(np.zeros((1, 1, 2, 2))), Tensor(np.zeros((1, 1, 2, 3))))
        assert info.value.dimension == "width"


class TestResampling:
    """Test bilinear resizing."""

    @pytest.mark.parametrize(("size", "factor"), [(11, 4), (22, 2), (44, 2)])
    def test_upsample_shapes(self, size, factor):
        out = upsample_bilinear(Tensor(np.zeros((1, 1, size, size))), factor)
        assert out.shape == (1, 1, size * factor, size * factor)

    def test_downsample_shape(self):
        assert downsample(Tensor(np.zeros((1, 1, 44, 44))), 4).shape == (1, 1, 11, 11)

    def test_constant_preserved(self):
        """Test that resampling keeps a constant map constant."""
        x = Tensor(np.full((1, 2, 6, 10), 0.7))
        np.testing.assert_allclose(resize_bilinear(x, (13, 4)).data, 0.7)

    def test_same_size_is_identity(self, rng):
        x = rng.standard_normal((1, 1, 5, 7))
        np.testing.assert_array_equal(resize_bilinear(Tensor(x), (5, 7)).data, x)

    def test_half_pixel_upsample(self):
        """Test the align-corners=False convention on a 2-pixel row."""
        x = Tensor(np.array([[[[0.0, 1.0]]]]))
        np.testing.assert_allclose(resize_bilinear(x, (1, 4)).data[0, 0, 0], [0.0, 0.25, 0.75, 1.0])

    def test_indivisible_downsample(self):
        with pytest.raises(ShapeError):
            downsample(Tensor(np.zeros((1, 1, 10, 10))), 4)

    def test_invalid_factor(self):
        with pytest.raises(ValidationError):
            upsample_bilinear(Tensor(np.zeros((1, 1, 4, 4))), 3)

    def test_gradient(self, rng, gradcheck):
        weights = rng.standard_normal((1, 1, 7, 3))
        err = gradcheck(lambda x: weighted_sum(resize_bilinear(x, (7, 3)), weights), [rng.standard_normal((1, 1, 4, 5))])
        assert err < 1e-6


class TestChannelOps:
    """Test channel concatenation and splitting."""

    @settings(max_examples=25, deadline=None)
    @given(groups=st.integers(1, 4), group_size=st.integers(1, 4))
    def test_split_then_concat(self, groups, group_size):
        """Test that concatenating the split pieces restores the input."""
        x = np.arange(groups * group_size * 6, dtype=np.float64).reshape(1, groups * group_size, 2, 3)
        pieces = split_channels(Tensor(x), group_size)
        assert len(pieces) == groups
        assert all(p.shape[1] == group_size for p in pieces)
        np.testing.assert_array_equal(concat_channels(pieces).data, x)

    def test_split_indivisible(self):
        with pytest.raises(ShapeError):
            split_channels(Tensor(np.zeros((1, 5, 2, 2))), 2)

    def test_concat_spatial_mismatch(self):
        with pytest.raises(ShapeError):
            concat_channels([Tensor(np.zeros((1, 1, 2, 2))), Tensor(np.zeros((1, 1, 3, 2)))])

    def test_gradient(self, rng, gradcheck):
        weights = rng.standard_normal((1, 6, 2, 2))

        def fn(a, b):
            first, second = split_channels(concat_channels([a, b]), 3)
            return weighted_sum(concat_channels([second, first]), weights)

        assert gradcheck(fn, [rng.standard_normal((1, 2, 2, 2)), rng.standard_normal((1, 4, 2, 2))]) < 1e-6
