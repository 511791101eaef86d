from __future__ import annotations

import csv
import io
import json

import numpy as np
import pytest

from codbench.exceptions import DataIOError
from codbench.exceptions import ValidationError
from codbench.lib.metrics import EvalPair
from codbench.lib.metrics import evaluate_pairs
from codbench.lib.metrics import generalization_table
from codbench.lib.report import ReportRenderer
from codbench.lib.report import dataset_table


@pytest.fixture
def renderer():
    return ReportRenderer()


@pytest.fixture
def report(rng):
    g = np.zeros((12, 12), dtype=bool)
    g[3:9, 2:10] = True
    pairs = [
        EvalPair("COD10K-CAM-2-Terrestrial-23-Cat-5", np.clip(g + rng.uniform(0, 0.3, g.shape), 0, 1), g, "Terrestrial", "Cat"),
        EvalPair("camourflage_00007", rng.uniform(0, 1, g.shape), g),
    ]
    return evaluate_pairs(pairs, dataset="CAMO", model="sinet")


class TestMetricReport:
    def test_markdown(self, renderer, report):
        md = renderer.markdown(report)
        assert md.startswith("# CAMO / sinet")
        assert "2 images evaluated." in md
        assert "## Sub-classes" in md
        assert "Terrestrial/Cat" in md
        assert "Missing predictions" not in md

    def test_csv_full_precision(self, renderer, report):
        rows = list(csv.reader(io.StringIO(renderer.csv(report))))
        assert rows[0] == ["name", "super_class", "sub_class", "s_alpha", "e_phi", "f_beta_w", "mae"]
        assert [r[0] for r in rows[1:]] == ["COD10K-CAM-2-Terrestrial-23-Cat-5", "camourflage_00007"]
        assert float(rows[1][6]) == report.images[0].mae

    def test_write_and_rerender(self, renderer, report, temp_dir):
        paths = renderer.write(report, temp_dir, "eval-CAMO")
        assert [p.name for p in paths] == ["eval-CAMO.json", "eval-CAMO.csv", "eval-CAMO.md"]
        assert renderer.rerender(paths[0]) == renderer.markdown(report)
        assert renderer.load(paths[0]) == report

    def test_selected_formats(self, renderer, report, temp_dir):
        paths = renderer.write(report, temp_dir / "nested", "r", formats=("markdown",))
        assert [p.name for p in paths] == ["r.md"]


class TestOtherDocuments:
    def test_benchmark_table(self, renderer, report, temp_dir):
        table = dataset_table([report])
        md = renderer.markdown(table)
        assert "| Model | CAMO S_α↑" in md
        header = renderer.csv(table).splitlines()[0]
        assert header == "Model,count,CAMO:s_alpha,CAMO:e_phi,CAMO:f_beta_w,CAMO:mae"
        (path,) = renderer.write(table, temp_dir, "table", formats=("json",))
        assert renderer.rerender(path) == md

    def test_generalization(self, renderer):
        table = generalization_table([[0.803, 0.702], [0.742, 0.700]], ["CAMO", "COD10K"])
        md = renderer.markdown(table)
        assert "12.6%" in md
        assert "-6.0%" in md
        rows = list(csv.reader(io.StringIO(renderer.csv(table))))
        assert rows[0] == ["trained_on", "CAMO", "COD10K", "self", "mean_others", "drop"]
        assert float(rows[1][3]) == 0.803

    def test_single_dataset_generalization(self, renderer):
        md = renderer.markdown(generalization_table([[0.7]], ["only"]))
        assert "N/A" in md


class TestLoad:
    """Test reloading written JSON documents."""

    def _doc(self, renderer, report, temp_dir, **changes):
        data = json.loads(renderer.json(report))
        data.update(changes)
        path = temp_dir / "doc.json"
        path.write_text(json.dumps(data), encoding="utf-8")
        return path

    def test_unknown_kind(self, renderer, report, temp_dir):
        with pytest.raises(ValidationError):
            renderer.load(self._doc(renderer, report, temp_dir, kind="spreadsheet"))

    def test_future_schema(self, renderer, report, temp_dir):
        with pytest.raises(ValidationError):
            renderer.load(self._doc(renderer, report, temp_dir, schema_version=2))

    def test_garbage(self, renderer, temp_dir):
        path = temp_dir / "bad.json"
        path.write_text("{not json", encoding="utf-8")
        with pytest.raises(ValidationError):
            renderer.load(path)

    def test_missing_file(self, renderer, temp_dir):
        with pytest.raises(DataIOError):
            renderer.load(temp_dir / "absent.json")
