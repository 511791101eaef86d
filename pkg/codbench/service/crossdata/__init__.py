from __future__ import annotations

import os
import typing as t

from codbench.exceptions import ValidationError
from codbench.lib.metrics import GeneralizationTable
from codbench.lib.metrics import MetricReport
from codbench.lib.metrics import generalization_table
from codbench.lib.report import FORMATS
from codbench.lib.report import Format
from codbench.lib.report import ReportRenderer
from codbench.service import BaseService
from codbench.service.crossdata.types import CrossDataResult
from codbench.service.crossdata.types import CrossDataSpec
from codbench.service.crossdata.types import CrossRun
from codbench.service.decorators import log_call
from codbench.service.evaluation import EvaluationService

OUTPUT_STEM = "crossdata"


class CrossDatasetService(BaseService):
    """Train-on-one, test-on-others generalization: assembles the score
    matrix and derives self, mean-others and drop per dataset."""

    def matrix(self, spec: CrossDataSpec) -> tuple[list[str], list[list[float]]]:
        """Dataset order and the square score matrix of a spec.

        Raises:
            ValidationError: When a cell is missing or given twice, or
                trained-on and tested-on names differ.
        """
        if spec.matrix is not None:
            names = list(spec.datasets) if spec.datasets is not None else [f"D{i}" for i in range(len(spec.matrix))]
            return names, [list(row) for row in spec.matrix]

        names = list(spec.datasets) if spec.datasets is not None else _first_seen(spec.runs)
        cells: dict[tuple[str, str], float] = {}
        for run in spec.runs:
            key = (run.trained_on, run.tested_on)
            if key in cells:
                raise ValidationError(reason=f"run {key[0]}->{key[1]} is given twice")
            if key[0] not in names or key[1] not in names:
                raise ValidationError(reason=f"run {key[0]}->{key[1]} names a dataset outside {names}")
            cells[key] = self.score(run, spec.metric)
        missing = [f"{a}->{b}" for a in names for b in names if (a, b) not in cells]
        if missing:
            raise ValidationError(reason=f"score matrix is not square, missing {', '.join(missing)}")
        return names, [[cells[a, b] for b in names] for a in names]

    def score(self, run: CrossRun, metric: str) -> float:
        if run.score is not None:
            return run.score
        if run.report is not None:
            doc = ReportRenderer().load(run.report)
            if not isinstance(doc, MetricReport):
                raise ValidationError(reason=f"{run.report} holds a {doc.kind}, not a metric-report")
            report = doc
        elif run.pred_dir is not None and run.gt_root is not None:
            report = EvaluationService(self.config).score(run.pred_dir, run.gt_root, model=run.trained_on)
        else:
            raise ValidationError(reason=f"run {run.trained_on}->{run.tested_on} has no score source")
        value = report.overall.value(metric)
        if value is None:
            raise ValidationError(reason=f"run {run.trained_on}->{run.tested_on} has no scored images")
        return value

    def table(self, spec: CrossDataSpec) -> GeneralizationTable:
        names, matrix = self.matrix(spec)
        table = generalization_table(matrix, names, metric=spec.metric)
        if len(names) == 1:
            self.logger.warning("A single dataset has no others; drop is reported as N/A")
        return table

    @log_call
    def run(
        self,
        spec: CrossDataSpec,
        out_dir: str | os.PathLike[str],
        *,
        formats: t.Iterable[Format] = FORMATS,
    ) -> CrossDataResult:
        table = self.table(spec)
        files = ReportRenderer().write(table, out_dir, OUTPUT_STEM, formats)
        return CrossDataResult(table=table, files=files)


def _first_seen(runs: t.Sequence[CrossRun]) -> list[str]:
    seen: dict[str, None] = {}
    for run in runs:
        seen.setdefault(run.trained_on, None)
    for run in runs:
        seen.setdefault(run.tested_on, None)
    return list(seen)
