from __future__ import annotations

import numpy as np
import pytest

from codbench.exceptions import ValidationError
from codbench.lib.metrics import EvalPair
from codbench.lib.metrics import evaluate_pairs
from codbench.lib.report import BenchmarkTable
from codbench.lib.report import Column
from codbench.lib.report import TableRow
from codbench.lib.report import class_table
from codbench.lib.report import dataset_table
from codbench.lib.report import summary_table
from codbench.lib.report import table_view


def _report(model, dataset, noise, seed=0):
    gen = np.random.default_rng(seed)
    g = np.zeros((10, 10), dtype=bool)
    g[2:7, 3:8] = True
    pairs = [
        EvalPair("COD10K-CAM-1-Aquatic-3-Crab-1", np.clip(g + gen.uniform(0, noise, g.shape), 0, 1), g, "Aquatic", "Crab"),
        EvalPair("COD10K-CAM-3-Flying-53-Bird-2", np.clip(g + gen.uniform(0, noise, g.shape), 0, 1), g, "Flying", "Bird"),
    ]
    return evaluate_pairs(pairs, dataset=dataset, model=model)


class TestDatasetTable:
    """Test the models-by-datasets table."""

    def test_layout(self):
        reports = [_report("a", "CAMO", 0.2), _report("b", "CAMO", 0.5), _report("a", "COD10K", 0.3)]
        table = dataset_table(reports)
        assert table.groups == ("CAMO", "COD10K")
        assert [c.key for c in table.columns[:4]] == ["CAMO:s_alpha", "CAMO:e_phi", "CAMO:f_beta_w", "CAMO:mae"]
        assert [r.label for r in table.rows] == ["a", "b"]
        assert table.rows[1].values["COD10K:mae"] is None

    def test_best_per_column(self):
        table = dataset_table([_report("a", "CAMO", 0.1), _report("b", "CAMO", 0.6)])
        best = table.best()
        assert best["CAMO:mae"] == table.rows[0].values["CAMO:mae"]
        assert best["CAMO:s_alpha"] == table.rows[0].values["CAMO:s_alpha"]

    def test_duplicate_pair(self):
        with pytest.raises(ValidationError):
            dataset_table([_report("a", "CAMO", 0.1), _report("a", "CAMO", 0.2)])


class TestClassTables:
    def test_sub_classes(self):
        table = class_table(_report("m", "COD10K", 0.2), "sub")
        assert table.row_header == "Sub-class"
        assert [r.label for r in table.rows] == ["Aquatic/Crab", "Flying/Bird"]
        assert all(r.count == 1 for r in table.rows)
        assert table.title == "COD10K per sub-class (m)"

    def test_super_classes(self):
        table = class_table(_report("", "COD10K", 0.2), "super")
        assert [r.label for r in table.rows] == ["Aquatic", "Flying"]
        assert table.title == "COD10K per super-class"

    def test_summary_has_no_best(self):
        table = summary_table(_report("m", "CAMO", 0.2))
        assert table.rows[0].count == 2
        assert set(table.best().values()) == {None}


class TestTableView:
    """Test the rendered cells."""

    def test_half_up_and_bold(self):
        table = BenchmarkTable(
            title="t",
            columns=(Column(group="", metric="s_alpha"), Column(group="", metric="mae")),
            rows=(
                TableRow(label="x", values={"s_alpha": 0.8125, "mae": 0.0405}),
                TableRow(label="y", values={"s_alpha": 0.8, "mae": None}),
            ),
        )
        view = table_view(table)
        assert view.header == ["Model", "S_α↑", "M↓"]
        assert view.rows == [["x", "**0.813**", "**0.041**"], ["y", "0.800", "N/A"]]
        assert view.align == [":---", "---:", "---:"]

    def test_grouped_headers_and_counts(self):
        table = class_table(_report("m", "CAMO", 0.2))
        view = table_view(table)
        assert view.header[:3] == ["Sub-class", "N", "S_α↑"]
        assert view.align[:3] == [":---", ":---", "---:"]

        grouped = table_view(dataset_table([_report("a", "CAMO", 0.1), _report("a", "COD10K", 0.1)]))
        assert grouped.header[1] == "CAMO S_α↑"
