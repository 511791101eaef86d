from __future__ import annotations

import typing as t

from codbench.config import Config
from codbench.config import build_config
from codbench.config.model.backbone import BackboneConfig
from codbench.config.model.train import TrainConfig
from codbench.helper.mixin import LoggingMixin


class BaseService(LoggingMixin):
    __logtag__ = "codbench.service"

    def __init_subclass__(cls, **kwargs: t.Any) -> None:
        cls.__logtag__ = f"codbench.service:{cls.__name__}"
        super().__init_subclass__(**kwargs)

    def __init__(self, config: Config | None = None) -> None:
        super().__init__()
        self.config = config or build_config()

    @property
    def threads(self) -> int:
        return self.config.core.runtime.threads

    @property
    def seed(self) -> int | None:
        return self.config.core.runtime.seed

    def seeded_backbone(self) -> BackboneConfig:
        """Backbone config whose initialization seed follows the runtime
        seed when one is set."""
        backbone = self.config.model.backbone
        if self.seed is None:
            return backbone
        return BackboneConfig.model_validate({**backbone.model_dump(), "seed": self.seed})

    def seeded_train(self, **overrides: t.Any) -> TrainConfig:
        """Training config with overrides applied, validated again."""
        data = self.config.model.train.model_dump()
        if self.seed is not None:
            data["seed"] = self.seed
        data.update({k: v for k, v in overrides.items() if v is not None})
        return TrainConfig.model_validate(data)
