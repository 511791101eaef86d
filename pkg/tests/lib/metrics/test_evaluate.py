from __future__ import annotations

import numpy as np
import pytest

from codbench.exceptions import DataIOError
from codbench.exceptions import MissingPredictionError
from codbench.exceptions import ValidationError
from codbench.lib import imageio
from codbench.lib.dataset import load_manifest
from codbench.lib.metrics import EvalPair
from codbench.lib.metrics import Evaluator
from codbench.lib.metrics import MetricReport
from codbench.lib.metrics import evaluate_pair
from codbench.lib.metrics import evaluate_pairs


def _mask(h=8, w=8, box=(2, 6, 2, 6)):
    m = np.zeros((h, w), dtype=bool)
    m[box[0] : box[1], box[2] : box[3]] = True
    return m


@pytest.fixture
def masks():
    return {
        "COD10K-CAM-1-Aquatic-1-BatFish-1": _mask(),
        "COD10K-CAM-1-Aquatic-3-Crab-2": _mask(box=(0, 4, 0, 8)),
        "COD10K-CAM-3-Flying-53-Bird-3": _mask(box=(4, 8, 1, 3)),
        "camo_0001": _mask(box=(1, 7, 3, 5)),
    }


@pytest.fixture
def predictions(masks, temp_dir):
    """Perfect predictions."""
    out = temp_dir / "pred"
    for stem, m in masks.items():
        imageio.write_mask(out / f"{stem}.png", m)
    return out


class TestEvaluatePairs:
    """Test in-memory evaluation and aggregation."""

    def test_mean_aggregation(self):
        g = _mask()
        report = evaluate_pairs(
            [EvalPair("a", g.astype(float), g), EvalPair("b", np.full(g.shape, 0.5), g)], dataset="toy"
        )
        assert report.overall.count == 2
        assert report.overall.mae == pytest.approx(0.25)
        assert [i.name for i in report.images] == ["a", "b"]

    def test_matches_per_image_sums(self, rng):
        """Test that every aggregate is the plain mean of per-image scores."""
        pairs = []
        for i in range(6):
            g = rng.uniform(size=(9, 9)) > 0.5
            pairs.append(EvalPair(f"img{i}", rng.integers(0, 256, size=(9, 9)) / 255, g))
        report = evaluate_pairs(pairs, dataset="mini")
        per_image = np.array([evaluate_pair(p.pred, p.gt) for p in pairs])
        np.testing.assert_allclose(
            [report.overall.s_alpha, report.overall.e_phi, report.overall.f_beta_w, report.overall.mae],
            per_image.mean(axis=0),
            atol=1e-12,
        )

    def test_thread_count_does_not_change_result(self, rng):
        pairs = [
            EvalPair(f"p{i}", rng.uniform(size=(10, 10)), rng.uniform(size=(10, 10)) > 0.4) for i in range(8)
        ]
        single = Evaluator(threads=1).evaluate_pairs(pairs, dataset="d")
        pooled = Evaluator(threads=4).evaluate_pairs(list(reversed(pairs)), dataset="d")
        assert single == pooled

    def test_duplicate_names(self):
        g = _mask()
        with pytest.raises(ValidationError):
            evaluate_pairs([EvalPair("a", g, g), EvalPair("a", g, g)])

    def test_class_breakdown(self):
        g = _mask()
        report = evaluate_pairs(
            [
                EvalPair("x", g.astype(float), g, "Aquatic", "Crab"),
                EvalPair("y", np.zeros(g.shape), g, "Aquatic", "BatFish"),
                EvalPair("z", g.astype(float), g, "Flying", "Bird"),
            ]
        )
        assert list(report.super_classes) == ["Aquatic", "Flying"]
        assert report.super_classes["Aquatic"].count == 2
        assert list(report.sub_classes) == ["Aquatic/BatFish", "Aquatic/Crab", "Flying/Bird"]
        assert report.sub_classes["Aquatic/BatFish"].f_beta_w == 0.0


class TestEvaluateDataset:
    """Test directory evaluation."""

    def test_perfect_predictions(self, write_dataset, masks, predictions):
        root = write_dataset(masks, name="COD10K")
        report = Evaluator().evaluate_dataset(predictions, root, model="oracle")
        assert report.dataset == "COD10K"
        assert report.model == "oracle"
        assert report.overall.count == 4
        assert report.overall.mae == 0.0
        assert report.overall.s_alpha == pytest.approx(1.0, abs=1e-9)
        assert report.super_classes["other"].count == 1
        assert "Aquatic/Crab" in report.sub_classes

    def test_missing_lists_every_name(self, write_dataset, masks, predictions):
        (predictions / "camo_0001.png").unlink()
        (predictions / "COD10K-CAM-3-Flying-53-Bird-3.png").unlink()
        root = write_dataset(masks)
        with pytest.raises(MissingPredictionError) as excinfo:
            Evaluator().evaluate_dataset(predictions, root)
        assert excinfo.value.missing == ["COD10K-CAM-3-Flying-53-Bird-3", "camo_0001"]

    def test_skip_missing(self, write_dataset, masks, predictions):
        (predictions / "camo_0001.png").unlink()
        report = Evaluator(skip_missing=True).evaluate_dataset(predictions, load_manifest(write_dataset(masks)))
        assert report.overall.count == 3
        assert report.missing == ("camo_0001",)

    def test_extra_predictions_ignored(self, write_dataset, masks, predictions):
        imageio.write_mask(predictions / "unrelated.png", _mask())
        (predictions / "notes.txt").write_text("ignored")
        report = Evaluator().evaluate_dataset(predictions, write_dataset(masks))
        assert report.overall.count == 4

    def test_resizes_predictions(self, write_dataset, temp_dir):
        """Test that a prediction of another size is resized to the mask."""
        root = write_dataset({"full": np.ones((8, 8), dtype=bool)})
        imageio.write_gray(temp_dir / "big" / "full.png", np.full((16, 12), 255, dtype=np.uint8))
        report = Evaluator().evaluate_dataset(temp_dir / "big", root)
        assert report.overall.mae == 0.0

    def test_missing_directory(self, write_dataset, masks, temp_dir):
        with pytest.raises(DataIOError):
            Evaluator().evaluate_dataset(temp_dir / "absent", write_dataset(masks))

    def test_report_round_trip(self, write_dataset, masks, predictions):
        report = Evaluator().evaluate_dataset(predictions, write_dataset(masks))
        assert MetricReport.model_validate_json(report.model_dump_json()) == report
