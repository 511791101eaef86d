from __future__ import annotations

from hypothesis import given
from hypothesis import settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp
import numpy as np
import pytest

from codbench.config.bench.metrics import MetricsConfig
from codbench.exceptions import ValidationError
from codbench.lib.metrics import e_measure_curve
from codbench.lib.metrics import e_measure_mean
from codbench.lib.metrics import evaluate_pair
from codbench.lib.metrics import mae
from codbench.lib.metrics import nearest_foreground
from codbench.lib.metrics import oracle
from codbench.lib.metrics import s_measure
from codbench.lib.metrics import weighted_f_measure
from codbench.lib.tensor import ShapeError


@pytest.fixture
def gt():
    g = np.zeros((12, 12), dtype=bool)
    g[3:8, 2:9] = True
    return g


@pytest.fixture
def pred(gt, rng):
    return np.clip(gt * 0.7 + rng.uniform(0.0, 0.3, gt.shape), 0.0, 1.0)


masks = hnp.arrays(np.bool_, (6, 6))
maps = hnp.arrays(np.float64, (6, 6), elements=st.integers(0, 255).map(lambda v: v / 255))


class TestMae:
    def test_perfect(self, gt):
        assert mae(gt.astype(float), gt) == 0.0

    def test_half(self, gt):
        assert mae(np.full(gt.shape, 0.5), gt) == 0.5

    @settings(max_examples=40, deadline=None)
    @given(maps, masks)
    def test_complement(self, p, g):
        """Test MAE(P, G) + MAE(1 - P, G) = 1."""
        assert mae(p, g) + mae(1.0 - p, g) == pytest.approx(1.0)


class TestSMeasure:
    """Test the structure measure."""

    def test_perfect(self, gt):
        assert s_measure(gt.astype(float), gt) == pytest.approx(1.0, abs=1e-9)

    def test_empty_pair(self):
        z = np.zeros((5, 5))
        assert s_measure(z, z.astype(bool)) == 1.0

    def test_degenerate_rules(self, pred):
        assert s_measure(pred, np.zeros(pred.shape, dtype=bool)) == pytest.approx(1.0 - pred.mean())
        assert s_measure(pred, np.ones(pred.shape, dtype=bool)) == pytest.approx(pred.mean())

    def test_in_unit_interval(self, gt):
        assert 0.0 <= s_measure(1.0 - gt, gt) <= 1.0

    def test_worse_prediction_scores_lower(self, gt, pred):
        assert s_measure(pred, gt) > s_measure(1.0 - pred, gt)

    def test_alpha(self, gt, pred):
        """Test that alpha 1 keeps only the object term."""
        assert s_measure(pred, gt, alpha=1.0) != pytest.approx(s_measure(pred, gt, alpha=0.0))


class TestEMeasure:
    """Test the enhanced-alignment measure."""

    def test_perfect(self, gt):
        """Test that only the t = 0 level, where every pixel is on, falls
        short of perfect alignment."""
        assert e_measure_mean(gt.astype(float), gt) == pytest.approx((255 + 0.25) / 256)

    def test_complement(self, gt):
        assert e_measure_mean(1.0 - gt, gt) == pytest.approx(0.25 / 256)

    def test_curve(self, gt, pred):
        curve = e_measure_curve(pred, gt)
        assert curve.shape == (256,)
        assert np.all((curve >= 0.0) & (curve <= 1.0))
        assert curve.mean() == pytest.approx(e_measure_mean(pred, gt))

    def test_empty_gt_and_prediction(self):
        """Test that an empty prediction of an empty mask is perfect above t = 0."""
        z = np.zeros((4, 4))
        assert e_measure_curve(z, z.astype(bool))[1:].tolist() == [1.0] * 255

    def test_constant_half_matches_reference(self, gt):
        p = np.full(gt.shape, 0.5)
        assert e_measure_mean(p, gt) == pytest.approx(oracle.e_measure_mean(p, gt), abs=1e-12)

    def test_levels(self, gt, pred):
        assert e_measure_curve(pred, gt, levels=16).shape == (16,)


class TestWeightedFMeasure:
    """Test the weighted F-measure."""

    def test_perfect(self, gt):
        assert weighted_f_measure(gt.astype(float), gt) == pytest.approx(1.0, abs=1e-9)

    def test_empty_prediction(self, gt):
        assert weighted_f_measure(np.zeros(gt.shape), gt) == 0.0

    @pytest.mark.parametrize("box", [np.s_[0:4, 0:4], np.s_[4:8, 5:8], np.s_[:, 0:1], np.s_[7:8, 7:8]])
    def test_empty_prediction_at_border(self, box):
        """Test that foreground touching the image border still scores 0
        against an all-zero prediction."""
        g = np.zeros((8, 8), dtype=bool)
        g[box] = True
        p = np.zeros(g.shape)
        assert weighted_f_measure(p, g) == 0.0
        assert oracle.weighted_f_measure(p, g) == 0.0

    @given(masks)
    @settings(max_examples=40, deadline=None)
    def test_zero_prediction_any_mask(self, g):
        assert weighted_f_measure(np.zeros(g.shape), g) == 0.0

    def test_empty_gt(self, pred):
        assert weighted_f_measure(pred, np.zeros(pred.shape, dtype=bool)) == 0.0

    def test_monotonic_degradation(self, gt):
        """Test that turning off foreground pixels of a perfect prediction
        never raises F or lowers MAE."""
        p = gt.astype(float)
        f, m = weighted_f_measure(p, gt), mae(p, gt)
        for i, j in np.argwhere(gt)[::3]:
            p[i, j] = 0.0
            f_next, m_next = weighted_f_measure(p, gt), mae(p, gt)
            assert f_next <= f + 1e-12
            assert m_next >= m
            f, m = f_next, m_next


class TestNearestForeground:
    def test_tie_breaks_to_smallest_index(self):
        """Test that a pixel equidistant from two objects picks the one
        first in row-major order."""
        g = np.zeros((3, 3), dtype=bool)
        g[0, 1] = g[2, 1] = True
        nearest = nearest_foreground(g)
        # background pixels in row-major order: (0,0) (0,2) (1,0) (1,1) (1,2) (2,0) (2,2)
        assert nearest.tolist() == [1, 1, 1, 1, 1, 7, 7]

    def test_many_ties(self):
        """Test a centre pixel ringed by more equidistant objects than
        the first neighbour query returns."""
        g = np.zeros((11, 11), dtype=bool)
        for dy, dx in [(0, 5), (5, 0), (3, 4), (4, 3)]:
            for sy in (-1, 1):
                for sx in (-1, 1):
                    g[5 + sy * dy, 5 + sx * dx] = True
        assert g.sum() == 12
        nearest = nearest_foreground(g)
        bg = [int(i * 11 + j) for i, j in np.argwhere(~g)]
        assert nearest[bg.index(60)] == 5


class TestSymmetry:
    """Test invariance under a simultaneous horizontal flip."""

    @settings(max_examples=25, deadline=None)
    @given(maps, masks)
    def test_mae_and_e_measure(self, p, g):
        assert mae(p[:, ::-1], g[:, ::-1]) == pytest.approx(mae(p, g))
        assert e_measure_mean(p[:, ::-1], g[:, ::-1]) == pytest.approx(e_measure_mean(p, g))

    def test_weighted_f(self, gt):
        """Test a prediction whose foreground error is uniform, so nearest
        pixel ties cannot matter."""
        p = np.where(gt, 0.8, 0.1)
        p[0, 0] = 0.6
        flipped = weighted_f_measure(p[:, ::-1], gt[:, ::-1])
        assert flipped == pytest.approx(weighted_f_measure(p, gt), abs=1e-12)


class TestInputChecks:
    @pytest.mark.parametrize("fn", [mae, s_measure, e_measure_mean, weighted_f_measure])
    def test_size_mismatch(self, fn):
        with pytest.raises(ShapeError):
            fn(np.zeros((4, 5)), np.zeros((4, 4), dtype=bool))

    def test_non_binary_gt(self):
        with pytest.raises(ValidationError):
            mae(np.zeros((2, 2)), np.full((2, 2), 0.5))

    def test_nan_prediction(self):
        with pytest.raises(ValidationError):
            s_measure(np.full((2, 2), np.nan), np.zeros((2, 2)))

    def test_prediction_clamped(self, gt):
        assert mae(gt * 3.0, gt) == 0.0


class TestEvaluatePair:
    def test_default_and_explicit_config_agree(self, gt, pred):
        assert evaluate_pair(pred, gt) == pytest.approx(evaluate_pair(pred, gt, MetricsConfig()))

    def test_config_is_used(self, gt, pred):
        scores = evaluate_pair(pred, gt, MetricsConfig(alpha=1.0, thresholds=2))
        assert scores.s_alpha == pytest.approx(s_measure(pred, gt, alpha=1.0))
        assert scores.e_phi == pytest.approx(e_measure_mean(pred, gt, levels=2))
