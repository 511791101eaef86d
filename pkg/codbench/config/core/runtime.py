from __future__ import annotations

import typing as t

from pydantic import Field

from codbench.helper.settings import BaseModel
from codbench.utils import default_threads


class RuntimeConfig(BaseModel):
    threads: int = Field(
        default_factory=default_threads,
        ge=1,
        le=512,
        description="Worker pool size for image-level work. Results never depend on it.",
    )

    precision: t.Literal["float64", "float32"] = Field(
        default="float64",
        description="Tensor precision: float64 for tests and gradient checks, float32 for speed.",
    )

    seed: int | None = Field(
        default=None,
        ge=0,
        description="When set, replaces the initialization, shuffling and toy dataset seeds.",
    )

    debug: bool = Field(
        default=False,
        description="Check every tensor op result for NaN/Inf.",
    )
