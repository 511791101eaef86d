from __future__ import annotations

import pathlib

from pydantic import Field

from codbench.cli.args import RunArgs
from codbench.cli.helper import display
from codbench.lib.report import FORMATS
from codbench.lib.report import Format
from codbench.utils import fmt_percent
from codbench.utils import fmt_score


class Args(RunArgs):
    """Cross-dataset generalization: self score, mean over the other
    datasets and relative drop per trained-on dataset.

    The runs file holds either `matrix` (rows trained on, columns tested
    on, with optional `datasets` names) or `runs`, a list of
    trained_on/tested_on cells each carrying a `score`, a saved eval
    `report`, or a `pred_dir` plus `gt_root` to evaluate.
    """

    runs: pathlib.Path = Field(
        alias="r",
        description="YAML/JSON runs file.",
    )

    out: pathlib.Path = Field(
        alias="o",
        description="Directory the generalization table is written to.",
    )

    formats: list[Format] = Field(
        default_factory=lambda: list(FORMATS),
        alias="f",
        description="Table formats to write.",
    )

    def run(self) -> None:
        from codbench.service.crossdata import CrossDatasetService
        from codbench.service.crossdata.types import CrossDataSpec

        cfg = self.load_config()
        spec = CrossDataSpec.from_file(self.runs)
        display.banner("Cross-dataset generalization", subtitle=spec.metric)

        with display.loading("Assembling the score matrix"):
            result = CrossDatasetService(cfg).run(spec, self.out, formats=self.formats)

        with display.section("Drop per trained-on dataset"):
            display.key_value(
                {
                    row.dataset: f"self {fmt_score(row.self_score)}, others {fmt_score(row.mean_others)}, "
                    f"drop {fmt_percent(row.drop)}"
                    for row in result.table.rows
                },
                indent=1,
            )
        display.paths(result.files)
