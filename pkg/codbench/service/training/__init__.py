from __future__ import annotations

import os
import pathlib

from codbench.config.model.sinet import SinetConfig
from codbench.config.model.train import TrainConfig
from codbench.exceptions import DataIOError
from codbench.lib.nn import save_weights
from codbench.lib.toy import export_dataset
from codbench.lib.toy import make_blob_dataset
from codbench.lib.train import Trainer
from codbench.lib.train import TrainResult
from codbench.lib.train import write_loss_curve
from codbench.service import BaseService
from codbench.service.decorators import log_call
from codbench.service.training import const
from codbench.service.training.types import ToyTrainingResult
from codbench.service.training.types import ToyTrainingSummary


class ToyTrainingService(BaseService):
    """Trains the network on the seeded blob set and stores the weights,
    the loss curve, a summary and optionally the set itself."""

    def toy_sinet(self, size: int) -> SinetConfig:
        """Configured architecture with the input size set to the toy
        resolution, so inference never rescales toy images."""
        return self.config.model.sinet.variant(input_size=size)

    def toy_train(
        self,
        *,
        lr: float | None = None,
        batch_size: int | None = None,
        max_steps: int | None = None,
        epochs: int | None = None,
    ) -> TrainConfig:
        return self.seeded_train(
            lr=const.TOY_LR if lr is None else lr,
            batch_size=const.TOY_BATCH_SIZE if batch_size is None else batch_size,
            max_steps=const.TOY_MAX_STEPS if max_steps is None else max_steps,
            epochs=epochs,
        )

    @log_call
    def run(
        self,
        out_dir: str | os.PathLike[str],
        *,
        images: int = const.TOY_IMAGES,
        size: int = const.TOY_SIZE,
        lr: float | None = None,
        batch_size: int | None = None,
        max_steps: int | None = None,
        epochs: int | None = None,
        export_data: bool = True,
    ) -> ToyTrainingResult:
        """Train once and write the artifacts into `out_dir`.

        Raises:
            ValidationError: On an invalid toy size or training setup.
            DataIOError: When an artifact cannot be written.
        """
        out = pathlib.Path(out_dir)
        seed = self.seed if self.seed is not None else 0
        dataset = make_blob_dataset(images, size, seed)
        train_cfg = self.toy_train(lr=lr, batch_size=batch_size, max_steps=max_steps, epochs=epochs)
        trainer = Trainer(train_cfg, sinet=self.toy_sinet(size), backbone=self.seeded_backbone())
        result = trainer.fit(dataset)

        summary = self.summarize(result, images=images, size=size, seed=seed)
        weights = save_weights(result.params, out / const.WEIGHTS_FILE)
        curve = write_loss_curve(result.losses, out / const.LOSS_FILE)
        self._write_summary(summary, out / const.SUMMARY_FILE)
        data_root = export_dataset(dataset, out / const.DATA_DIR) if export_data else None

        self.logger.info(
            f"Loss {summary.initial_loss:.4f} -> {summary.final_loss:.4f} "
            f"({summary.loss_drop:.1%} drop), training IoU {summary.train_iou:.3f}"
        )
        return ToyTrainingResult(summary=summary, weights=weights, loss_curve=curve, data_root=data_root)

    @staticmethod
    def summarize(result: TrainResult, *, images: int, size: int, seed: int) -> ToyTrainingSummary:
        first, last = result.losses[0], result.losses[-1]
        return ToyTrainingSummary(
            variant=result.params.sinet.label,
            images=images,
            size=size,
            seed=seed,
            steps=result.steps,
            initial_loss=first,
            final_loss=last,
            loss_drop=(first - last) / first if first else 0.0,
            train_iou=result.train_iou,
        )

    def _write_summary(self, summary: ToyTrainingSummary, path: pathlib.Path) -> None:
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(summary.model_dump_json(indent=2) + "\n", encoding="utf-8")
        except OSError as e:
            raise DataIOError(path=str(path), reason=str(e)) from e
