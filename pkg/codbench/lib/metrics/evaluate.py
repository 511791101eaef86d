from __future__ import annotations

import concurrent.futures
import os
import pathlib
import typing as t

import numpy.typing as npt

from codbench.exceptions import DataIOError
from codbench.exceptions import MissingPredictionError
from codbench.exceptions import ValidationError
from codbench.helper.mixin import LoggingMixin
from codbench.lib import imageio
from codbench.lib.dataset.manifest import UNKNOWN_CLASS
from codbench.lib.dataset.manifest import DatasetManifest
from codbench.lib.dataset.manifest import ManifestRecord
from codbench.lib.dataset.manifest import load_manifest
from codbench.lib.metrics.measures import evaluate_pair
from codbench.lib.metrics.report import ImageScore
from codbench.lib.metrics.report import MetricReport
from codbench.utils import file_stem

if t.TYPE_CHECKING:
    from codbench.config.bench.metrics import MetricsConfig


class EvalPair(t.NamedTuple):
    name: str
    pred: npt.ArrayLike
    gt: npt.ArrayLike
    super_class: str = UNKNOWN_CLASS
    sub_class: str = UNKNOWN_CLASS


class Evaluator(LoggingMixin):
    """Scores predictions against ground truth and aggregates overall,
    per super-class and per sub-class.

    Predictions are matched to masks by file stem, read as 8-bit gray
    maps divided by 255 and bilinear-resized to the mask size when they
    differ. Images are scored on a bounded thread pool; aggregation is
    independent of completion order.

    Example:
        ```python
        evaluator = Evaluator(threads=8)
        report = evaluator.evaluate_dataset("preds/CAMO", "datasets/CAMO/test")
        report.overall.s_alpha
        ```
    """

    __logtag__ = "codbench.lib.metrics.evaluate"

    def __init__(
        self,
        config: MetricsConfig | None = None,
        *,
        threads: int = 1,
        skip_missing: bool = False,
        mask_threshold: int = imageio.MASK_THRESHOLD,
    ) -> None:
        super().__init__()
        self.config = config
        self.threads = max(1, threads)
        self.skip_missing = skip_missing
        self.mask_threshold = mask_threshold

    def evaluate_pairs(self, pairs: t.Iterable[EvalPair], *, dataset: str = "", model: str = "") -> MetricReport:
        """Score in-memory (prediction, mask) pairs."""
        items = list(pairs)
        names = [p.name for p in items]
        if len(set(names)) != len(names):
            raise ValidationError(reason="pair names must be unique")
        return MetricReport.from_images(self._map(self._score_pair, items), dataset=dataset, model=model)

    def evaluate_dataset(
        self,
        pred_dir: str | os.PathLike[str],
        manifest: DatasetManifest | str | os.PathLike[str],
        *,
        model: str = "",
    ) -> MetricReport:
        """Score a directory of prediction images against a dataset.

        Args:
            pred_dir: Directory of 8-bit grayscale prediction images.
            manifest: Loaded manifest, dataset root or manifest file.
            model: Run name recorded in the report.

        Returns:
            The report; `missing` lists skipped names in skip mode.

        Raises:
            MissingPredictionError: Listing every mask without a
                prediction, unless skipping is enabled.
            DataIOError: When a file cannot be read.
        """
        if not isinstance(manifest, DatasetManifest):
            manifest = load_manifest(manifest)
        pred_dir = pathlib.Path(pred_dir)
        predictions = self._index(pred_dir)

        self.bind_context(dataset=manifest.name)
        records = manifest.ordered()
        missing = [r.name for r in records if r.name not in predictions]
        for name in missing:
            self.logger.warning(f"No prediction for {name} in {pred_dir}")
        if missing and not self.skip_missing:
            raise MissingPredictionError(missing, pred_dir=str(pred_dir))

        jobs = [(r, predictions[r.name]) for r in records if r.name in predictions]
        self.logger.info(f"Evaluating {len(jobs)} predictions of {manifest.name} with {self.threads} worker(s)")
        images = self._map(self._score_file, jobs)
        report = MetricReport.from_images(images, dataset=manifest.name, model=model, missing=missing)
        self.logger.info(f"Scored {report.overall.count} images of {manifest.name}")
        return report

    # ============================================================================
    # Private Methods
    # ============================================================================

    def _index(self, pred_dir: pathlib.Path) -> dict[str, pathlib.Path]:
        if not pred_dir.is_dir():
            raise DataIOError(path=str(pred_dir), reason="prediction directory not found")
        index: dict[str, pathlib.Path] = {}
        for path in sorted(pred_dir.iterdir()):
            if not path.is_file() or not imageio.is_image_file(path):
                continue
            stem = file_stem(path)
            if stem in index:
                self.logger.warning(f"Several predictions for {stem}; using {index[stem].name}")
                continue
            index[stem] = path
        return index

    def _map(self, fn: t.Callable[[t.Any], ImageScore], items: t.Sequence[t.Any]) -> list[ImageScore]:
        if self.threads == 1 or len(items) <= 1:
            return [fn(item) for item in items]
        with concurrent.futures.ThreadPoolExecutor(max_workers=self.threads) as pool:
            return list(pool.map(fn, items))

    def _score_pair(self, pair: EvalPair) -> ImageScore:
        scores = evaluate_pair(pair.pred, pair.gt, self.config)
        return ImageScore(name=pair.name, super_class=pair.super_class, sub_class=pair.sub_class, **scores._asdict())

    def _score_file(self, job: tuple[ManifestRecord, pathlib.Path]) -> ImageScore:
        record, path = job
        gt = imageio.read_mask(record.mask, self.mask_threshold)
        pred = imageio.read_prediction(path, size=gt.shape)
        self.logger.debug(f"Scoring {record.name}")
        return self._score_pair(EvalPair(record.name, pred, gt, record.super_class, record.sub_class))


def evaluate_pairs(
    pairs: t.Iterable[EvalPair],
    config: MetricsConfig | None = None,
    *,
    threads: int = 1,
    dataset: str = "",
    model: str = "",
) -> MetricReport:
    return Evaluator(config, threads=threads).evaluate_pairs(pairs, dataset=dataset, model=model)


def evaluate_dataset(
    pred_dir: str | os.PathLike[str],
    manifest: DatasetManifest | str | os.PathLike[str],
    config: MetricsConfig | None = None,
    *,
    threads: int = 1,
    skip_missing: bool = False,
    model: str = "",
) -> MetricReport:
    return Evaluator(config, threads=threads, skip_missing=skip_missing).evaluate_dataset(pred_dir, manifest, model=model)
