from __future__ import annotations

from pydantic import Field

from codbench.helper.settings import BaseModel


class TrainConfig(BaseModel):
    batch_size: int = Field(
        default=36,
        ge=1,
        description="Images per optimization step.",
    )

    lr: float = Field(
        default=1e-4,
        ge=0.0,
        description="Initial Adam learning rate.",
    )

    decay_rate: float = Field(
        default=0.1,
        gt=0.0,
        le=1.0,
        description="Factor applied to the learning rate every decay_epochs epochs.",
    )

    decay_epochs: int = Field(
        default=50,
        ge=1,
        description="Epoch period of the step learning-rate decay.",
    )

    epochs: int = Field(
        default=100,
        ge=1,
        description="Number of passes over the training set.",
    )

    max_steps: int | None = Field(
        default=None,
        ge=1,
        description="Stop after this many optimization steps, whatever the epoch count.",
    )

    betas: tuple[float, float] = Field(
        default=(0.9, 0.999),
        description="Adam exponential decay rates of the first and second moments.",
    )

    adam_eps: float = Field(
        default=1e-8,
        gt=0.0,
        description="Adam denominator epsilon.",
    )

    clip: float | None = Field(
        default=0.5,
        gt=0.0,
        description="Element-wise gradient clipping bound; empty disables clipping.",
    )

    seed: int = Field(
        default=0,
        ge=0,
        description="Seed of the batch shuffling generator.",
    )
