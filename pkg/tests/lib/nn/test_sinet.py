from __future__ import annotations

from hypothesis import given
from hypothesis import settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp
import numpy as np
import pytest

from codbench.config.model.backbone import BackboneConfig
from codbench.config.model.sinet import SinetConfig
from codbench.exceptions import ValidationError
from codbench.lib.loss import total_loss
from codbench.lib.nn import Layers
from codbench.lib.nn import SinetParams
from codbench.lib.nn import gra_block
from codbench.lib.nn import group_guidance
from codbench.lib.nn import init_sinet_params
from codbench.lib.nn import ncd
from codbench.lib.nn import reverse_guidance
from codbench.lib.nn import sinet_forward
from codbench.lib.nn import tem
from codbench.lib.nn.sinet import tem_layout
from codbench.lib.tensor import ShapeError
from codbench.lib.tensor import Tape
from codbench.lib.tensor import Tensor
from codbench.lib.tensor import backward
from codbench.lib.tensor import downsample
from codbench.lib.tensor import mul
from codbench.lib.tensor import sum_all
from codbench.lib.tensor import upsample_bilinear


class TestSinetShapes:
    """Test side-output shapes across sizes and variants."""

    def test_tiny_64(self, tiny_params, rng):
        out = sinet_forward(Tensor(rng.standard_normal((2, 3, 64, 64))), tiny_params)
        assert out.c6.shape == (2, 1, 8, 8)
        assert out.c5.shape == (2, 1, 2, 2)
        assert out.c4.shape == (2, 1, 4, 4)
        assert out.c3.shape == (2, 1, 8, 8)
        assert all(o.shape == (2, 1, 64, 64) for o in out.upsampled)

    @pytest.mark.slow
    def test_default_352(self, rng):
        """Test the default width at the default input size."""
        params = init_sinet_params()
        out = sinet_forward(Tensor(rng.standard_normal((1, 3, 352, 352))), params)
        assert out.c6.shape == (1, 1, 44, 44)
        assert out.c5.shape == (1, 1, 11, 11)
        assert out.c4.shape == (1, 1, 22, 22)
        assert out.c3.shape == (1, 1, 44, 44)
        assert out.c3_up.shape == (1, 1, 352, 352)
        assert np.all(np.isfinite(out.c3_up.data))

    @pytest.mark.parametrize("decoder", ["ncd", "pd", "none"])
    @pytest.mark.parametrize("tem_style", ["asymmetric", "symmetric", "none"])
    def test_variants_keep_shapes(self, tiny_sinet, tiny_backbone, rng, decoder, tem_style):
        sinet = tiny_sinet.variant(decoder=decoder, tem_style=tem_style)
        params = init_sinet_params(sinet, tiny_backbone)
        out = sinet_forward(Tensor(rng.standard_normal((1, 3, 64, 64))), params)
        assert out.c3.shape == (1, 1, 8, 8)

    def test_rejects_indivisible_input(self, tiny_params):
        with pytest.raises(ShapeError):
            sinet_forward(Tensor(np.zeros((1, 3, 48, 48))), tiny_params)

    def test_rejects_foreign_config(self, tiny_params, tiny_sinet):
        with pytest.raises(ValidationError):
            sinet_forward(Tensor(np.zeros((1, 3, 64, 64))), tiny_params, tiny_sinet.variant(decoder="pd"))

    def test_deterministic(self, tiny_sinet, tiny_backbone, rng):
        image = Tensor(rng.standard_normal((1, 3, 64, 64)))
        a = sinet_forward(image, init_sinet_params(tiny_sinet, tiny_backbone))
        b = sinet_forward(image, init_sinet_params(tiny_sinet, tiny_backbone))
        np.testing.assert_array_equal(a.c3_up.data, b.c3_up.data)


class TestSinetConfig:
    """Test architecture validation."""

    @pytest.mark.parametrize(
        "changes",
        [
            {"groups": (3, 3, 3)},
            {"reverse": (2, 0, 0)},
            {"dilations": (1, 2, 5, 7)},
            {"input_size": 100},
        ],
    )
    def test_rejects(self, changes):
        with pytest.raises(ValueError):
            SinetConfig().variant(**changes)

    def test_label(self):
        assert SinetConfig().label == "ncd/asymmetric/rev100/g{32;8;1}"


class TestGroupGuidance:
    """Test the guidance interleave."""

    @pytest.mark.parametrize(("group_size", "channels"), [(32, 33), (8, 36), (1, 64)])
    def test_channel_counts(self, group_size, channels):
        p = Tensor(np.zeros((1, 32, 4, 4)))
        r = Tensor(np.zeros((1, 1, 4, 4)))
        assert group_guidance(p, r, group_size).shape == (1, channels, 4, 4)

    def test_layout(self):
        """Test that the guidance follows each group in order."""
        p = Tensor(np.arange(4, dtype=np.float64)[None, :, None, None] * np.ones((1, 4, 2, 2)))
        r = Tensor(np.full((1, 1, 2, 2), 10.0))
        out = group_guidance(p, r, 2)
        np.testing.assert_array_equal(out.data[0, :, 0, 0], [0.0, 1.0, 10.0, 2.0, 3.0, 10.0])

    def test_layout_widths(self):
        """Test the refinement conv input widths of the default network."""
        specs = init_sinet_params().specs
        assert [specs[f"gra3.{i}.v"].in_channels for i in range(3)] == [33, 36, 64]

    def test_refinement_units_are_normalized(self):
        """Test that the channel-reduce conv of each block carries batch norm
        and the single-channel residual conv a bias."""
        params = init_sinet_params()
        assert params.specs["gra3.0.v"].has_batchnorm
        assert "gra3.0.v.bn.gamma" in params.tensors
        assert "gra3.0.v.bn.running_var" in params.buffers
        assert not params.specs["gra3.0.w"].has_batchnorm
        assert "gra3.0.w.conv.bias" in params.tensors

    def test_indivisible(self):
        with pytest.raises(ShapeError):
            group_guidance(Tensor(np.zeros((1, 6, 2, 2))), Tensor(np.zeros((1, 1, 2, 2))), 4)


class TestReverseGuidance:
    """Test the reversed coarse map."""

    @settings(max_examples=30, deadline=None)
    @given(hnp.arrays(np.float64, (1, 1, 4, 4), elements=st.floats(-30.0, 30.0)))
    def test_complements_sigmoid(self, c):
        """Test that the reversed and plain guidance sum to one."""
        rev = reverse_guidance(Tensor(c), 4)
        plain = reverse_guidance(Tensor(c), 4, reverse=False)
        np.testing.assert_allclose(rev.data + plain.data, 1.0, atol=1e-12)

    def test_zero_logits(self):
        r = reverse_guidance(Tensor(np.zeros((1, 1, 8, 8))), 5)
        assert r.shape == (1, 1, 2, 2)
        np.testing.assert_allclose(r.data, 0.5)

    def test_confident_foreground(self):
        r = reverse_guidance(Tensor(np.full((1, 1, 4, 4), 40.0)), 3)
        assert r.shape == (1, 1, 8, 8)
        assert r.data.max() < 1e-12

    def test_invalid_level(self):
        with pytest.raises(ValidationError):
            reverse_guidance(Tensor(np.zeros((1, 1, 4, 4))), 6)

    def test_multi_channel(self):
        with pytest.raises(ShapeError):
            reverse_guidance(Tensor(np.zeros((1, 2, 4, 4))), 4)


def zero_gra(params: SinetParams) -> SinetParams:
    """Copy with every refinement conv zeroed."""
    return params.with_arrays(
        {name: np.zeros(p.shape) for name, p in params.tensors.items() if name.startswith("gra")}
    )


class TestGraBlock:
    """Test the group-reversal attention block."""

    def test_zero_weights_are_identity(self, tiny_params, rng):
        layers = Layers(zero_gra(tiny_params))
        p = Tensor(rng.standard_normal((1, 8, 4, 4)))
        r = Tensor(rng.standard_normal((1, 1, 4, 4)))
        p_next, r_next = gra_block(p, r, layers, "gra4.0", 8)
        np.testing.assert_array_equal(p_next.data, p.data)
        np.testing.assert_array_equal(r_next.data, r.data)

    def test_residual_cascade(self, tiny_params, rng):
        """Test that without refinement each map is its guidance plus the
        resized coarser map."""
        out = sinet_forward(Tensor(rng.standard_normal((1, 3, 64, 64))), zero_gra(tiny_params))
        c5 = reverse_guidance(out.c6, 5).data + downsample(out.c6, 4).data
        c4 = reverse_guidance(out.c5, 4).data + upsample_bilinear(out.c5, 2).data
        c3 = reverse_guidance(out.c4, 3).data + upsample_bilinear(out.c4, 2).data
        np.testing.assert_allclose(out.c5.data, c5, atol=1e-12)
        np.testing.assert_allclose(out.c4.data, c4, atol=1e-12)
        np.testing.assert_allclose(out.c3.data, c3, atol=1e-12)

    def test_spatial_mismatch(self, tiny_params):
        with pytest.raises(ShapeError):
            gra_block(Tensor(np.zeros((1, 8, 4, 4))), Tensor(np.zeros((1, 1, 2, 2))), Layers(tiny_params), "gra4.0", 8)


class TestSearchPhase:
    """Test the texture-enhanced module and the decoder."""

    def test_tem_output(self, tiny_params, rng):
        out = tem(Tensor(rng.standard_normal((1, 8, 8, 8))), Layers(tiny_params), "tem3")
        assert out.shape == (1, 8, 8, 8)
        assert out.data.min() >= 0.0

    def test_tem_rejects_width(self, tiny_params):
        with pytest.raises(ShapeError):
            tem(Tensor(np.zeros((1, 5, 8, 8))), Layers(tiny_params), "tem3")

    def test_factorized_matches_rank_one(self, rng):
        """Test that k x 1 then 1 x k branches equal one k x k branch
        whose kernel is their composition."""
        asym_cfg = SinetConfig(channels=4, groups=(4, 2, 1), bn_eps=1e-300)
        sym_cfg = asym_cfg.variant(tem_style="symmetric")
        backbone = BackboneConfig()
        asym = SinetParams.initialize(tem_layout("tem3", 6, asym_cfg), sinet=asym_cfg, backbone=backbone, seed=3)
        sym = SinetParams.initialize(tem_layout("tem3", 6, sym_cfg), sinet=sym_cfg, backbone=backbone, seed=3)

        arrays = {name: asym.tensors[name].data for name in sym.tensors if name in asym.tensors}
        for b in (1, 2, 3):
            column = asym.tensors[f"tem3.b{b}.1.conv.weight"].data[:, :, :, 0]
            row = asym.tensors[f"tem3.b{b}.2.conv.weight"].data[:, :, 0, :]
            arrays[f"tem3.b{b}.1.conv.weight"] = np.einsum("omb,mia->oiab", row, column)
        sym = sym.with_arrays(arrays)

        f = Tensor(rng.standard_normal((1, 6, 9, 9)))
        np.testing.assert_allclose(tem(f, Layers(sym), "tem3").data, tem(f, Layers(asym), "tem3").data, atol=1e-10)

    def test_ncd_zero_top_level(self, tiny_params, rng):
        """Test that a zero top level gates every path to zero."""
        f3 = Tensor(rng.standard_normal((1, 8, 8, 8)))
        f4 = Tensor(rng.standard_normal((1, 8, 4, 4)))
        f5 = Tensor(np.zeros((1, 8, 2, 2)))
        out = ncd(f3, f4, f5, Layers(tiny_params))
        assert out.shape == (1, 1, 8, 8)
        np.testing.assert_array_equal(out.data, 0.0)

    def test_ncd_rejects_misaligned(self, tiny_params):
        with pytest.raises(ShapeError):
            ncd(
                Tensor(np.zeros((1, 8, 6, 6))),
                Tensor(np.zeros((1, 8, 4, 4))),
                Tensor(np.zeros((1, 8, 2, 2))),
                Layers(tiny_params),
            )


class TestSinetGradients:
    """Test differentiation through the whole network."""

    def test_reaches_every_parameter(self, tiny_params, rng):
        image = Tensor(rng.standard_normal((2, 3, 64, 64)))
        mask = (rng.uniform(size=(2, 1, 64, 64)) > 0.5).astype(np.float64)
        with Tape() as tape:
            out = sinet_forward(image, tiny_params, training=True)
            loss = total_loss(out.upsampled, mask)
        grads = backward(tape, loss).named()
        assert set(grads) == set(tiny_params.tensors)

    @pytest.mark.slow
    def test_matches_finite_differences(self, tiny_params, rng, gradcheck):
        """Test sampled parameter gradients of a 64 x 64 forward pass."""
        image = Tensor(rng.standard_normal((1, 3, 64, 64)))
        weights = rng.standard_normal((1, 1, 64, 64))
        names = ["backbone.stem.conv.weight", "tem4.b2.1.conv.weight", "ncd.g1.bn.gamma", "gra3.2.v.conv.weight"]

        def fn(*tensors):
            params = tiny_params.replace(tensors=dict(zip(names, tensors, strict=True)))
            return sum_all(mul(sinet_forward(image, params).c3_up, Tensor(weights)))

        err = gradcheck(fn, [tiny_params.tensors[n].data for n in names], coords=6)
        assert err < 1e-3
