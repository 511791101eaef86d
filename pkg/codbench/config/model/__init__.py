from __future__ import annotations

from pydantic import Field

from codbench.config.model.backbone import BackboneConfig
from codbench.config.model.sinet import SinetConfig
from codbench.config.model.train import TrainConfig
from codbench.helper.settings import BaseModel


class ModelConfig(BaseModel):
    backbone: BackboneConfig = Field(
        default_factory=BackboneConfig,
        description="Feature pyramid configuration",
    )

    sinet: SinetConfig = Field(
        default_factory=SinetConfig,
        description="Segmentation network architecture",
    )

    train: TrainConfig = Field(
        default_factory=TrainConfig,
        description="Optimization schedule",
    )
