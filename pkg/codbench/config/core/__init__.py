from __future__ import annotations

from pydantic import Field

from codbench.config.core.logging import LoggingConfig
from codbench.config.core.runtime import RuntimeConfig
from codbench.helper.settings import BaseModel


class CoreConfig(BaseModel):
    logging: LoggingConfig = Field(
        default_factory=LoggingConfig,
        description="Log sinks; loguru handlers are replaced on init.",
    )

    runtime: RuntimeConfig = Field(
        default_factory=RuntimeConfig,
        description="Worker threads, tensor precision, seed and debug checks.",
    )
