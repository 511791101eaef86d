from __future__ import annotations

from pydantic import Field

from codbench.helper.settings import BaseModel


class BackboneConfig(BaseModel):
    """Widths of the strided convolutional pyramid that stands in for a
    pretrained classification backbone.

    The stem produces level 1 (stride 2); each of the four stages halves
    the resolution again, producing levels 2 to 5.
    """

    stem_channels: int = Field(
        default=16,
        ge=1,
        le=1024,
        description="Output channels of the stride-2 stem convolution (level 1).",
    )

    stage_channels: tuple[int, int, int, int] = Field(
        default=(24, 32, 48, 64),
        description="Output channels of the four stride-2 stages (levels 2 to 5).",
    )

    seed: int = Field(
        default=0,
        ge=0,
        description="Seed of the parameter initialization generator.",
    )

    @property
    def level_channels(self) -> tuple[int, int, int, int, int]:
        return (self.stem_channels, *self.stage_channels)
