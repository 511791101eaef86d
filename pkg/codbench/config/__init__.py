from __future__ import annotations

import json
import os
import pathlib
import typing as t

from pydantic import Field
from pydantic_settings import SettingsConfigDict
import yaml

from codbench.config.bench import BenchConfig
from codbench.config.core import CoreConfig
from codbench.config.model import ModelConfig
from codbench.exceptions import ConfigurationError
from codbench.helper.settings import Settings


class Config(Settings):
    model_config: t.ClassVar[SettingsConfigDict] = SettingsConfigDict(
        env_prefix="CODBENCH__",
        validate_default=False,
        env_nested_delimiter="__",
        env_file=".env",
        extra="forbid",
    )

    core: CoreConfig = Field(
        default_factory=CoreConfig,
        description="Core configuration settings.",
    )

    model: ModelConfig = Field(
        default_factory=ModelConfig,
        description="Network, backbone and training configuration.",
    )

    bench: BenchConfig = Field(
        default_factory=BenchConfig,
        description="Metric and dataset statistics configuration.",
    )

    def init(self) -> None:
        from codbench.lib.tensor import runtime

        self.core.logging.init()
        runtime.configure(precision=self.core.runtime.precision, debug=self.core.runtime.debug)

    @classmethod
    def from_file(cls, path: str | os.PathLike[str]) -> Config:
        """Load a YAML or flat key=value configuration file."""
        path = pathlib.Path(path)
        if not path.is_file():
            raise ConfigurationError(config_key="config", reason=f"file not found: {path}")
        try:
            if path.suffix in {".yaml", ".yml"}:
                return cls.from_yaml(path)
            return cls.from_env_file(path)
        except (OSError, UnicodeDecodeError, yaml.YAMLError, json.JSONDecodeError) as e:
            raise ConfigurationError(config_key="config", reason=f"unreadable file {path}: {e}") from e


_active: Config | None = None


def build_config() -> Config:
    """The configuration installed by `setconfig`, or one built from
    defaults and the environment on first use."""
    global _active
    if _active is None:
        _active = Config()
    return _active


def setconfig(cfg: Config | None, /) -> None:
    """Install `cfg` for later `build_config` calls; `None` resets."""
    global _active
    _active = cfg
