from __future__ import annotations

import pathlib

from pydantic import Field

from codbench.cli.args import RunArgs
from codbench.cli.helper import display
from codbench.lib.report import FORMATS
from codbench.lib.report import Format
from codbench.utils import fmt_score


class Args(RunArgs):
    """Dataset statistics: object size, global and local contrast, center
    bias, resolutions and attribute coverage, plus the average-mask
    heatmap as a grayscale PNG."""

    dataset: pathlib.Path = Field(
        alias="d",
        description="Dataset root or CSV/JSON manifest.",
    )

    out: pathlib.Path = Field(
        alias="o",
        description="Directory the report and heatmap are written to.",
    )

    name: str | None = Field(
        default=None,
        description="Dataset name; defaults to the directory or manifest name.",
    )

    formats: list[Format] = Field(
        default_factory=lambda: list(FORMATS),
        alias="f",
        description="Report formats to write.",
    )

    def run(self) -> None:
        from codbench.service.stats import StatsService

        cfg = self.load_config()
        display.banner("Dataset statistics", subtitle=str(self.dataset))

        with display.loading("Analyzing dataset"):
            result = StatsService(cfg).run(self.dataset, self.out, name=self.name, formats=self.formats)

        stats = result.stats
        if stats.count == 0:
            display.warning(f"Dataset {stats.dataset} is empty; wrote an empty report")
        else:
            with display.section(stats.dataset):
                display.key_value(
                    {
                        "Images": stats.count,
                        "Mean object size": fmt_score(stats.object_size.mean),
                        "Mean global contrast": fmt_score(stats.contrast.global_contrast.mean),
                        "Mean local contrast": fmt_score(stats.contrast.local_contrast.mean),
                        "Mean center distance": fmt_score(stats.center_bias.distances.mean),
                        "Resolutions": len(stats.resolutions),
                    }
                )
        display.paths([*result.files, result.heatmap])
