from __future__ import annotations

from pydantic import Field

from codbench.helper.settings import BaseModel


class StatsConfig(BaseModel):
    big_object: float = Field(
        default=0.5,
        description="Object/image area ratio at or above which BO is set.",
    )

    small_object: float = Field(
        default=0.1,
        description="Object/image area ratio at or below which SO is set.",
    )

    boundary_chi2: float = Field(
        default=0.9,
        description="Chi-square distance below which the boundary is indefinable (IB).",
    )

    band_width: int = Field(
        default=15,
        ge=1,
        description="Width in pixels of the bands around the object boundary.",
    )

    hist_bins: int = Field(
        default=8,
        ge=1,
        le=256,
        description="Bins per RGB channel of the joint color histogram.",
    )

    chi2_eps: float = Field(
        default=1e-10,
        gt=0.0,
        description="Denominator epsilon of the chi-square distance.",
    )

    heatmap_size: int = Field(
        default=256,
        ge=1,
        description="Side of the common grid masks are resized to for the average-mask heatmap.",
    )

    size_bins: int = Field(
        default=20,
        ge=1,
        description="Number of uniform bins of the object-size and centroid-distance histograms.",
    )

    mask_threshold: int = Field(
        default=127,
        ge=0,
        le=254,
        description="Mask pixels strictly above this 8-bit value are foreground.",
    )
