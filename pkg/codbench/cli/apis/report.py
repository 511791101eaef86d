from __future__ import annotations

import pathlib

from pydantic import Field

from codbench.cli.args import RunArgs
from codbench.cli.helper import display
from codbench.lib.report import Format


class Args(RunArgs):
    """Re-render saved JSON reports.

    One input is rendered as is; several evaluation reports (or
    --combine) are merged into one models-by-datasets table.
    """

    inputs: list[pathlib.Path] = Field(
        alias="i",
        description="Saved JSON documents.",
    )

    format: Format = Field(
        default="markdown",
        alias="f",
        description="Output format.",
    )

    out: pathlib.Path | None = Field(
        default=None,
        alias="o",
        description="Output file; printed to stdout when omitted.",
    )

    combine: bool = Field(
        default=False,
        description="Merge evaluation reports into one table even for a single input.",
    )

    title: str = Field(
        default="Quantitative results",
        description="Title of a combined table.",
    )

    def run(self) -> None:
        from codbench.exceptions import DataIOError
        from codbench.service.report import ReportService

        service = ReportService(self.load_config())
        if len(self.inputs) > 1 or self.combine:
            doc = service.combine(self.inputs, title=self.title)
        else:
            doc = service.load(self.inputs[0])
        text = service.renderer.render(doc, self.format)

        if self.out is None:
            print(text, end="")
            return
        try:
            self.out.parent.mkdir(parents=True, exist_ok=True)
            self.out.write_text(text, encoding="utf-8")
        except OSError as e:
            raise DataIOError(path=str(self.out), reason=str(e)) from e
        display.saved(self.out)
