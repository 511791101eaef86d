from __future__ import annotations

import pathlib
import typing as t

from pydantic import Field

from codbench.cli.args import RunArgs
from codbench.cli.helper import display
from codbench.lib.report import FORMATS
from codbench.lib.report import Format
from codbench.service.training import const


class Args(RunArgs):
    """Train and score architecture variants on the toy set.

    The default grid varies one axis at a time from the configured
    network: decoder (pd, ncd), conv (symmetric, asymmetric), reverse
    (000, 100, 110, 111) and groups ({1;1;1}, {8;8;8}, {32;32;32},
    {1;8;32}, {32;8;1}), plus the rows without NCD and without TEM.
    Every entry is validated before any training starts.
    """

    grid: pathlib.Path | None = Field(
        default=None,
        alias="g",
        description="YAML/JSON grid (mode, decoder, tem_style, reverse, groups, removals).",
    )

    mode: t.Literal["one-axis", "cartesian"] | None = Field(
        default=None,
        description="Override the grid mode.",
    )

    out: pathlib.Path = Field(
        alias="o",
        description="Directory the ablation table is written to.",
    )

    images: int = Field(default=const.TOY_IMAGES, ge=1, description="Number of synthetic images.")
    size: int = Field(default=const.TOY_SIZE, ge=32, description="Side of the square images.")
    lr: float = Field(default=const.TOY_LR, gt=0.0, description="Adam learning rate.")
    batch_size: int = Field(default=const.TOY_BATCH_SIZE, ge=1, description="Images per step.")
    steps: int = Field(default=const.TOY_MAX_STEPS, ge=1, description="Maximum steps per variant.")

    formats: list[Format] = Field(
        default_factory=lambda: list(FORMATS),
        alias="f",
        description="Table formats to write.",
    )

    def run(self) -> None:
        from codbench.lib.report import ReportRenderer
        from codbench.service.ablation import AblationRunner
        from codbench.service.ablation.types import AblationGrid

        cfg = self.load_config()
        grid = AblationGrid.from_file(self.grid) if self.grid else AblationGrid()
        if self.mode is not None:
            grid = AblationGrid.model_validate({**grid.model_dump(), "mode": self.mode})

        runner = AblationRunner(cfg)
        variants = runner.variants(grid, runner.toy.toy_sinet(self.size))
        display.banner("Ablation", subtitle=f"{len(variants)} variant(s), {grid.mode}")
        display.key_value({v.name: v.sinet.label for v in variants}, indent=1)

        with display.loading(f"Training {len(variants)} variant(s) for up to {self.steps} steps each"):
            result = runner.run(
                grid,
                self.out,
                images=self.images,
                size=self.size,
                lr=self.lr,
                batch_size=self.batch_size,
                max_steps=self.steps,
                formats=self.formats,
            )

        print()
        print(ReportRenderer().markdown(result.table))
        display.paths(result.files)
