from __future__ import annotations

import pathlib
import typing as t

from codbench.valueobj import BaseValueObject


class ToyTrainingSummary(BaseValueObject):
    """What `summary.json` of a toy run holds."""

    variant: str
    images: int
    size: int
    seed: int
    steps: int
    initial_loss: float
    final_loss: float
    loss_drop: float
    train_iou: float


class ToyTrainingResult(t.NamedTuple):
    summary: ToyTrainingSummary
    weights: pathlib.Path
    loss_curve: pathlib.Path
    data_root: pathlib.Path | None
