from __future__ import annotations

import os
import pathlib
import typing as t

from codbench.lib import imageio
from codbench.lib.dataset import DatasetAnalysis
from codbench.lib.dataset import DatasetAnalyzer
from codbench.lib.dataset import ManifestLoader
from codbench.lib.report import FORMATS
from codbench.lib.report import Format
from codbench.lib.report import ReportRenderer
from codbench.service import BaseService
from codbench.service.decorators import log_call
from codbench.service.stats.types import StatsResult


class StatsService(BaseService):
    """Dataset statistics: object size, contrast, center bias,
    resolutions and attributes, plus the average-mask heatmap."""

    def analyze(self, dataset_root: str | os.PathLike[str], *, name: str | None = None) -> DatasetAnalysis:
        manifest = ManifestLoader().load(dataset_root, name=name)
        return DatasetAnalyzer(self.config.bench.stats, threads=self.threads).analyze(manifest)

    @log_call
    def run(
        self,
        dataset_root: str | os.PathLike[str],
        out_dir: str | os.PathLike[str],
        *,
        name: str | None = None,
        formats: t.Iterable[Format] = FORMATS,
    ) -> StatsResult:
        """Write `stats-<dataset>.{json,csv,md}` and
        `heatmap-<dataset>.png` into `out_dir`.

        An empty dataset still produces an (empty) report.
        """
        analysis = self.analyze(dataset_root, name=name)
        stem = analysis.stats.dataset
        files = ReportRenderer().write(analysis.stats, out_dir, f"stats-{stem}", formats)
        heatmap = imageio.write_gray(pathlib.Path(out_dir) / f"heatmap-{stem}.png", analysis.heatmap)
        return StatsResult(stats=analysis.stats, files=files, heatmap=heatmap)
