from __future__ import annotations

import numpy as np
import pytest

from codbench.exceptions import ValidationError
from codbench.lib.dataset import chi_square
from codbench.lib.dataset import color_histogram
from codbench.lib.dataset import global_contrast
from codbench.lib.dataset import local_contrast
from codbench.lib.dataset.contrast import boundary_bands
from codbench.lib.dataset.contrast import surround_contrast


@pytest.fixture
def mask():
    m = np.zeros((20, 20), dtype=bool)
    m[5:15, 5:15] = True
    return m


@pytest.fixture
def two_tone(mask):
    image = np.zeros((20, 20, 3), dtype=np.uint8)
    image[mask] = (200, 40, 40)
    return image


class TestHistogram:
    def test_bins(self):
        rgb = np.array([[[0, 0, 0], [255, 255, 255]]], dtype=np.uint8)
        hist = color_histogram(rgb, np.ones((1, 2), dtype=bool), bins=2)
        np.testing.assert_array_equal(hist, [0.5, 0, 0, 0, 0, 0, 0, 0.5])

    def test_empty_region(self, two_tone):
        hist = color_histogram(two_tone, np.zeros((20, 20), dtype=bool))
        assert hist.shape == (512,)
        assert hist.sum() == 0.0

    def test_size_mismatch(self, two_tone):
        with pytest.raises(ValidationError):
            color_histogram(two_tone, np.ones((5, 5), dtype=bool))


class TestChiSquare:
    def test_identical(self):
        h = np.array([0.25, 0.75])
        assert chi_square(h, h) == 0.0

    def test_disjoint(self):
        assert chi_square(np.array([1.0, 0.0]), np.array([0.0, 1.0])) == pytest.approx(1.0)


class TestBands:
    def test_partition(self, mask):
        bands = boundary_bands(mask, width=2)
        assert not np.any(bands.inner & bands.outer)
        assert not np.any(bands.inner & ~mask)
        assert bands.inner[5, 10] and bands.inner[6, 10]
        assert not bands.inner[10, 10]
        assert bands.outer[4, 10] and bands.outer[3, 10]
        assert not bands.outer[0, 10]


class TestContrast:
    """Test object/background contrast measures."""

    def test_two_tone_is_maximal(self, mask, two_tone):
        assert global_contrast(two_tone, mask) == pytest.approx(1.0)
        assert local_contrast(two_tone, mask, width=3) == pytest.approx(1.0)
        assert surround_contrast(two_tone, mask, width=3) == pytest.approx(1.0)

    def test_uniform_is_zero(self, mask):
        image = np.full((20, 20, 3), 90, dtype=np.uint8)
        assert global_contrast(image, mask) == 0.0
        assert local_contrast(image, mask) == 0.0

    @pytest.mark.parametrize("fill", [False, True])
    def test_single_region_undefined(self, two_tone, fill):
        m = np.full((20, 20), fill)
        assert global_contrast(two_tone, m) is None
        assert local_contrast(two_tone, m) is None
        assert surround_contrast(two_tone, m) is None
