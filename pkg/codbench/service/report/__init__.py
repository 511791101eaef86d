from __future__ import annotations

import os
import pathlib
import typing as t

from codbench.config import Config
from codbench.exceptions import ValidationError
from codbench.lib.metrics import MetricReport
from codbench.lib.report import FORMATS
from codbench.lib.report import BenchmarkTable
from codbench.lib.report import Document
from codbench.lib.report import Format
from codbench.lib.report import ReportRenderer
from codbench.lib.report import dataset_table
from codbench.service import BaseService


class ReportService(BaseService):
    """Re-renders saved JSON documents and merges evaluation reports
    into one models-by-datasets table."""

    def __init__(self, config: Config | None = None) -> None:
        super().__init__(config)
        self.renderer = ReportRenderer()

    def load(self, path: str | os.PathLike[str]) -> Document:
        return self.renderer.load(path)

    def rerender(self, path: str | os.PathLike[str], fmt: Format = "markdown") -> str:
        return self.renderer.rerender(path, fmt)

    def combine(self, paths: t.Sequence[str | os.PathLike[str]], *, title: str = "Quantitative results") -> BenchmarkTable:
        """Overall scores of several evaluation reports side by side.

        Raises:
            ValidationError: When a file is not an evaluation report or
                a (model, dataset) pair repeats.
        """
        reports = []
        for path in paths:
            doc = self.load(path)
            if not isinstance(doc, MetricReport):
                raise ValidationError(reason=f"{path} holds a {doc.kind}, not a metric-report")
            reports.append(doc)
        self.logger.info(f"Combining {len(reports)} report(s)")
        return dataset_table(reports, title=title)

    def write(
        self,
        doc: Document,
        out_dir: str | os.PathLike[str],
        stem: str,
        formats: t.Iterable[Format] = FORMATS,
    ) -> list[pathlib.Path]:
        return self.renderer.write(doc, out_dir, stem, formats)
