from __future__ import annotations

from pydantic import Field

from codbench.config.bench.metrics import MetricsConfig
from codbench.config.bench.stats import StatsConfig
from codbench.helper.settings import BaseModel


class BenchConfig(BaseModel):
    metrics: MetricsConfig = Field(
        default_factory=MetricsConfig,
        description="Evaluation metric constants",
    )

    stats: StatsConfig = Field(
        default_factory=StatsConfig,
        description="Dataset statistics and attribute thresholds",
    )
