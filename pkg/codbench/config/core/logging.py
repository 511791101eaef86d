from __future__ import annotations

import pathlib
import re
import sys
import typing as t

from pydantic import Field
from pydantic import field_validator

from codbench.helper.settings import BaseModel

STREAMS = ("stdout", "stderr")

# "<tag>" plus whatever run context the instance bound (variant, dataset)
CONSOLE_FORMAT = (
    "<green>{time:HH:mm:ss}</green> <level>{level: <7}</level> "
    "<cyan>{extra[tag]}</cyan> {message} <dim>{extra}</dim>"
)

_ROTATION = re.compile(r"^\d+(\.\d+)?\s*(B|KB|MB|GB|second|seconds|minute|minutes|hour|hours|day|days|week|weeks)$", re.I)


class LoggingTarget(BaseModel):
    logname: str = Field(
        default="stderr",
        description="'stdout', 'stderr' or a log file path; files are written as JSON lines.",
    )

    loglevel: t.Literal["trace", "debug", "info", "warning", "error", "critical"] = Field(
        default="info",
        description="Minimum level for this target.",
    )

    rotation: str | None = Field(
        default=None,
        description="File rotation as a size ('10 MB') or an interval ('6 hours'). Files only.",
    )

    retention: int | None = Field(
        default=None,
        ge=0,
        le=100,
        description="Rotated files to keep.",
    )

    @field_validator("rotation")
    @classmethod
    def _rotation_spec(cls, value: str | None) -> str | None:
        if value is not None and not _ROTATION.match(value.strip()):
            raise ValueError(f"rotation must be a size or an interval, got {value!r}")
        return value

    @property
    def is_stream(self) -> bool:
        return self.logname in STREAMS


class LoggingConfig(BaseModel):
    targets: list[LoggingTarget] = Field(
        default_factory=lambda: [LoggingTarget(logname="stderr", loglevel="warning")],
        description="Log sinks. The default keeps the console quiet below warnings.",
    )

    def init(self) -> None:
        from loguru import logger

        logger.remove()
        logger.configure(extra={"tag": "codbench"})
        for target in self.targets:
            level = target.loglevel.upper()
            if target.is_stream:
                logger.add(getattr(sys, target.logname), level=level, format=CONSOLE_FORMAT, colorize=None)
                continue
            sink = pathlib.Path(target.logname)
            sink.parent.mkdir(parents=True, exist_ok=True)
            logger.add(
                sink,
                level=level,
                serialize=True,
                rotation=target.rotation,
                retention=target.retention,
            )
