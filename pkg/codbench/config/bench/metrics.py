from __future__ import annotations

import math

from pydantic import Field

from codbench.helper.settings import BaseModel


class MetricsConfig(BaseModel):
    """Constants of the four benchmark metrics, kept in one block."""

    alpha: float = Field(
        default=0.5,
        ge=0.0,
        le=1.0,
        description="S-measure balance between the object and region terms.",
    )

    thresholds: int = Field(
        default=256,
        ge=2,
        description="Number of uniform binarization levels of the mean E-measure.",
    )

    gauss_window: int = Field(
        default=7,
        ge=1,
        description="Side of the Gaussian window of the weighted F-measure dependency step.",
    )

    gauss_sigma: float = Field(
        default=5.0,
        gt=0.0,
        description="Sigma of the Gaussian dependency window.",
    )

    importance_decay: float = Field(
        default=math.log(0.5) / 5.0,
        lt=0.0,
        description="Exponential decay of background pixel importance per pixel of distance.",
    )

    beta2: float = Field(
        default=1.0,
        gt=0.0,
        description="Beta squared of the weighted F-measure.",
    )
