from __future__ import annotations

import typing as t

import typing_extensions as te

from pydantic import Field
from pydantic import field_validator
from pydantic import model_validator

from codbench.helper.settings import BaseModel

TemStyle = t.Literal["asymmetric", "symmetric", "none"]
DecoderStyle = t.Literal["ncd", "pd", "none"]


class SinetConfig(BaseModel):
    """Architecture hyperparameters of the segmentation network.

    Every ablation axis is a field here, so a variant is fully described
    by its configuration.
    """

    channels: int = Field(
        default=32,
        ge=1,
        le=1024,
        description="Channel width C shared by the texture-enhanced features and the decoder.",
    )

    dilations: tuple[int, int, int, int] = Field(
        default=(1, 3, 5, 7),
        description="Dilation rate of each texture-enhanced branch; rate 1 is the plain 1x1 branch.",
    )

    tem_style: TemStyle = Field(
        default="asymmetric",
        description="Branch convolutions: asymmetric (k x 1 then 1 x k), symmetric (k x k) or none.",
    )

    decoder: DecoderStyle = Field(
        default="ncd",
        description="Coarse decoder: neighbor connection (ncd), partial decoder (pd) or none.",
    )

    reverse: tuple[int, int, int] = Field(
        default=(1, 0, 0),
        description="Whether the guidance is reversed before each of the three refinement blocks.",
    )

    groups: tuple[int, int, int] = Field(
        default=(32, 8, 1),
        description="Group size g_i of the guidance interleave in each refinement block.",
    )

    bn_eps: float = Field(
        default=1e-5,
        gt=0.0,
        description="Batch normalization epsilon.",
    )

    bn_momentum: float = Field(
        default=0.1,
        gt=0.0,
        le=1.0,
        description="Batch normalization running statistics momentum.",
    )

    input_size: int = Field(
        default=352,
        ge=32,
        description="Square side images are resized to before the forward pass.",
    )

    image_mean: tuple[float, float, float] = Field(
        default=(0.485, 0.456, 0.406),
        description="Per-channel mean subtracted from RGB inputs in [0, 1].",
    )

    image_std: tuple[float, float, float] = Field(
        default=(0.229, 0.224, 0.225),
        description="Per-channel std dividing RGB inputs in [0, 1].",
    )

    @field_validator("reverse")
    @classmethod
    def _binary_flags(cls, v: tuple[int, int, int]) -> tuple[int, int, int]:
        if any(flag not in (0, 1) for flag in v):
            raise ValueError(f"reverse flags must be 0 or 1, got {v}")
        return v

    @field_validator("dilations")
    @classmethod
    def _odd_dilations(cls, v: tuple[int, int, int, int]) -> tuple[int, int, int, int]:
        if any(d < 1 or d % 2 == 0 for d in v):
            raise ValueError(f"dilation rates must be odd and positive, got {v}")
        return v

    @field_validator("input_size")
    @classmethod
    def _divisible_input(cls, v: int) -> int:
        if v % 32:
            raise ValueError(f"input_size must be divisible by 32, got {v}")
        return v

    @model_validator(mode="after")
    def _groups_divide_channels(self) -> te.Self:
        for g in self.groups:
            if g < 1 or self.channels % g:
                raise ValueError(f"group size {g} does not divide channel width {self.channels}")
        return self

    def variant(self, **changes: t.Any) -> SinetConfig:
        """Return a validated copy with the given fields replaced."""
        return SinetConfig.model_validate({**self.model_dump(), **changes})

    @property
    def label(self) -> str:
        reverse = "".join(str(f) for f in self.reverse)
        groups = ";".join(str(g) for g in self.groups)
        return f"{self.decoder}/{self.tem_style}/rev{reverse}/g{{{groups}}}"
