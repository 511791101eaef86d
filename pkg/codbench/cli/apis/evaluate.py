from __future__ import annotations

import pathlib

from pydantic import Field

from codbench.cli.args import RunArgs
from codbench.cli.helper import display
from codbench.lib.report import FORMATS
from codbench.lib.report import Format


class Args(RunArgs):
    """Score a prediction directory against a dataset.

    Predictions are matched to masks by file stem, whatever the
    extension. Writes eval-<dataset>.json, .csv and .md with the overall,
    per super-class and per sub-class scores.
    """

    pred: pathlib.Path = Field(
        alias="p",
        description="Directory of 8-bit grayscale predictions.",
    )

    gt: pathlib.Path = Field(
        alias="g",
        description="Dataset root (Imgs/GT, Image/GT_Object or images/masks) or a CSV/JSON manifest.",
    )

    out: pathlib.Path = Field(
        alias="o",
        description="Directory the report is written to.",
    )

    model: str = Field(
        default="",
        description="Run name recorded in the report.",
    )

    dataset: str | None = Field(
        default=None,
        description="Dataset name; defaults to the directory or manifest name.",
    )

    skip_missing: bool = Field(
        default=False,
        description="Skip masks without a prediction instead of failing; they are listed in the report.",
    )

    formats: list[Format] = Field(
        default_factory=lambda: list(FORMATS),
        alias="f",
        description="Report formats to write.",
    )

    def run(self) -> None:
        from codbench.service.evaluation import EvaluationService

        cfg = self.load_config()
        display.banner("Evaluation", subtitle=f"{self.pred} vs {self.gt}")

        with display.loading("Scoring predictions"):
            result = EvaluationService(cfg).run(
                self.pred,
                self.gt,
                self.out,
                model=self.model,
                dataset=self.dataset,
                skip_missing=self.skip_missing,
                formats=self.formats,
            )

        report = result.report
        with display.section(f"{report.dataset} overall"):
            display.scores(report.overall)
        display.info(f"{len(report.super_classes)} super-class(es), {len(report.sub_classes)} sub-class(es)")
        if report.missing:
            display.warning(f"{len(report.missing)} image(s) had no prediction and were skipped")
        display.paths(result.files)
