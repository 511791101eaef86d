from __future__ import annotations

import numpy as np
import pytest

from codbench.exceptions import ValidationError
from codbench.lib import imageio
from codbench.lib.toy import export_dataset
from codbench.lib.toy import make_blob_dataset
from codbench.lib.toy import quantized_images


class TestBlobDataset:
    """Test the synthetic camouflage set."""

    def test_shapes_and_ranges(self):
        data = make_blob_dataset(n=3, size=64, seed=0)
        assert len(data) == 3
        assert data.images.shape == (3, 3, 64, 64)
        assert data.masks.shape == (3, 1, 64, 64)
        assert data.images.min() >= 0.0
        assert data.images.max() <= 1.0
        assert set(np.unique(data.masks)) <= {0.0, 1.0}
        assert data.names == ("blob-0000", "blob-0001", "blob-0002")

    def test_every_image_has_an_object(self):
        data = make_blob_dataset(n=8, size=64, seed=3)
        ratios = data.masks.reshape(8, -1).mean(axis=1)
        assert np.all(ratios > 0.0)
        assert np.all(ratios < 0.5)

    def test_seeded(self):
        a = make_blob_dataset(n=2, size=32, seed=5)
        b = make_blob_dataset(n=2, size=32, seed=5)
        c = make_blob_dataset(n=2, size=32, seed=6)
        np.testing.assert_array_equal(a.images, b.images)
        assert not np.array_equal(a.images, c.images)

    def test_low_contrast(self):
        """Test that the object differs only slightly from its surroundings."""
        data = make_blob_dataset(n=1, size=64, seed=0)
        fg = data.masks[0, 0] > 0
        gap = np.abs(data.images[0][:, fg].mean(axis=1) - data.images[0][:, ~fg].mean(axis=1))
        assert gap.max() < 0.3

    @pytest.mark.parametrize(("n", "size"), [(0, 64), (2, 48), (2, 0)])
    def test_rejects(self, n, size):
        with pytest.raises(ValidationError):
            make_blob_dataset(n=n, size=size)

    def test_subset(self):
        data = make_blob_dataset(n=4, size=32)
        part = data.subset([2, 0])
        assert part.names == ("blob-0002", "blob-0000")
        np.testing.assert_array_equal(part.images[0], data.images[2])


class TestExport:
    def test_layout(self, temp_dir):
        data = make_blob_dataset(n=2, size=32)
        root = export_dataset(data, temp_dir / "toy")
        assert sorted(p.name for p in (root / "GT").iterdir()) == ["blob-0000.png", "blob-0001.png"]
        np.testing.assert_array_equal(imageio.read_rgb(root / "Imgs" / "blob-0001.png"), quantized_images(data)[1])
        np.testing.assert_array_equal(imageio.read_mask(root / "GT" / "blob-0000.png"), data.masks[0, 0] > 0.5)
