from __future__ import annotations

import pathlib

from pydantic import Field

from codbench.cli.args import RunArgs
from codbench.cli.helper import display
from codbench.service.training import const


class Args(RunArgs):
    """Train the network on the seeded synthetic blob set.

    Writes weights.codw, loss.csv, summary.json and, unless disabled,
    the set itself under data/ (Imgs/ and GT/) so it can be fed to infer
    and eval.
    """

    out: pathlib.Path = Field(
        alias="o",
        description="Output directory.",
    )

    images: int = Field(
        default=const.TOY_IMAGES,
        ge=1,
        description="Number of synthetic images.",
    )

    size: int = Field(
        default=const.TOY_SIZE,
        ge=32,
        description="Side of the square images; a multiple of 32.",
    )

    lr: float = Field(
        default=const.TOY_LR,
        gt=0.0,
        description="Adam learning rate.",
    )

    batch_size: int = Field(
        default=const.TOY_BATCH_SIZE,
        ge=1,
        description="Images per step.",
    )

    steps: int = Field(
        default=const.TOY_MAX_STEPS,
        ge=1,
        description="Maximum number of optimization steps.",
    )

    epochs: int | None = Field(
        default=None,
        ge=1,
        description="Epoch count; defaults to the configured model.train.epochs.",
    )

    export_data: bool = Field(
        default=True,
        description="Do not write the synthetic set next to the weights.",
    )

    def run(self) -> None:
        from codbench.service.training import ToyTrainingService

        cfg = self.load_config()
        display.banner("Toy training", subtitle=f"{self.images} blobs at {self.size}x{self.size}")

        service = ToyTrainingService(cfg)
        with display.loading(f"Training for up to {self.steps} steps"):
            result = service.run(
                self.out,
                images=self.images,
                size=self.size,
                lr=self.lr,
                batch_size=self.batch_size,
                max_steps=self.steps,
                epochs=self.epochs,
                export_data=self.export_data,
            )

        s = result.summary
        with display.section("Summary"):
            display.key_value(
                {
                    "Variant": s.variant,
                    "Seed": s.seed,
                    "Steps": s.steps,
                    "Loss": f"{s.initial_loss:.4f} -> {s.final_loss:.4f} ({s.loss_drop:.1%} lower)",
                    "Training IoU": f"{s.train_iou:.3f}",
                }
            )
        files = [result.weights, result.loss_curve]
        if result.data_root is not None:
            files.append(result.data_root)
        display.paths(files)
