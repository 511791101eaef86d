from __future__ import annotations

import os
import typing as t

from codbench.lib.dataset import DatasetManifest
from codbench.lib.dataset import ManifestLoader
from codbench.lib.metrics import EvalPair
from codbench.lib.metrics import Evaluator
from codbench.lib.metrics import MetricReport
from codbench.lib.report import FORMATS
from codbench.lib.report import Format
from codbench.lib.report import ReportRenderer
from codbench.service import BaseService
from codbench.service.decorators import log_call
from codbench.service.evaluation.types import EvaluationResult


class EvaluationService(BaseService):
    """Scores prediction directories against datasets and writes the
    overall, per super-class and per sub-class report."""

    def evaluator(self, *, skip_missing: bool = False) -> Evaluator:
        return Evaluator(
            self.config.bench.metrics,
            threads=self.threads,
            skip_missing=skip_missing,
            mask_threshold=self.config.bench.stats.mask_threshold,
        )

    def load(self, gt_root: str | os.PathLike[str], *, name: str | None = None) -> DatasetManifest:
        return ManifestLoader().load(gt_root, name=name)

    def score(
        self,
        pred_dir: str | os.PathLike[str],
        gt_root: str | os.PathLike[str] | DatasetManifest,
        *,
        model: str = "",
        skip_missing: bool = False,
    ) -> MetricReport:
        manifest = gt_root if isinstance(gt_root, DatasetManifest) else self.load(gt_root)
        return self.evaluator(skip_missing=skip_missing).evaluate_dataset(pred_dir, manifest, model=model)

    def score_pairs(self, pairs: t.Iterable[EvalPair], *, dataset: str, model: str = "") -> MetricReport:
        return self.evaluator().evaluate_pairs(pairs, dataset=dataset, model=model)

    @log_call
    def run(
        self,
        pred_dir: str | os.PathLike[str],
        gt_root: str | os.PathLike[str],
        out_dir: str | os.PathLike[str],
        *,
        model: str = "",
        dataset: str | None = None,
        skip_missing: bool = False,
        formats: t.Iterable[Format] = FORMATS,
    ) -> EvaluationResult:
        """Evaluate and write `eval-<dataset>.{json,csv,md}` into `out_dir`.

        Raises:
            MissingPredictionError: When masks lack a prediction and
                skipping is off.
            DataIOError: On unreadable inputs or unwritable outputs.
        """
        manifest = self.load(gt_root, name=dataset)
        report = self.score(pred_dir, manifest, model=model, skip_missing=skip_missing)
        files = ReportRenderer().write(report, out_dir, f"eval-{report.dataset}", formats)
        if report.missing:
            self.logger.warning(f"{len(report.missing)} image(s) skipped for lack of a prediction")
        return EvaluationResult(report=report, files=files)
