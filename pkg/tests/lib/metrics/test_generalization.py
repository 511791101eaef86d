from __future__ import annotations

import numpy as np
import pytest

from codbench.exceptions import ValidationError
from codbench.lib.metrics import generalization_table
from codbench.lib.metrics import relative_drop


class TestGeneralizationTable:
    """Test cross-dataset drop computation."""

    def test_published_drops(self):
        """Test the drops of two models each tested on the other dataset."""
        table = generalization_table([[0.803, 0.702], [0.742, 0.700]], ["CAMO", "COD10K"])
        camo, cod = table.rows
        assert camo.self_score == 0.803
        assert camo.mean_others == pytest.approx(0.702)
        assert 100 * camo.drop == pytest.approx(12.6, abs=0.1)
        assert 100 * cod.drop == pytest.approx(-6.0, abs=0.1)

    def test_equal_entries(self):
        table = generalization_table(np.full((3, 3), 0.5))
        assert [r.drop for r in table.rows] == [0.0, 0.0, 0.0]
        assert table.datasets == ("D0", "D1", "D2")

    def test_mean_others_column(self):
        m = [[0.9, 0.1, 0.2], [0.3, 0.8, 0.4], [0.5, 0.6, 0.7]]
        table = generalization_table(m, metric="e_phi")
        assert table.metric == "e_phi"
        assert table.mean_others_column == pytest.approx((0.4, 0.35, 0.3))
        assert table.rows[1].mean_others == pytest.approx(0.35)

    def test_single_dataset(self):
        table = generalization_table([[0.7]], ["only"])
        assert table.rows[0].mean_others is None
        assert table.rows[0].drop is None
        assert table.mean_others_column == (None,)

    @pytest.mark.parametrize("scores", [[[0.1, 0.2]], [], [[0.1, np.nan], [0.2, 0.3]], [0.1, 0.2]])
    def test_rejects(self, scores):
        with pytest.raises(ValidationError):
            generalization_table(scores)

    def test_name_count(self):
        with pytest.raises(ValidationError):
            generalization_table([[0.1, 0.2], [0.3, 0.4]], ["a"])


class TestRelativeDrop:
    def test_zero_self(self):
        assert relative_drop(0.0, 0.3) is None

    def test_value(self):
        assert relative_drop(0.5, 0.25) == 0.5
