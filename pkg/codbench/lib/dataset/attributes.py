from __future__ import annotations

from dataclasses import dataclass
import itertools
import typing as t

import numpy as np
import numpy.typing as npt
from scipy import ndimage

from codbench.exceptions import ValidationError
from codbench.lib.dataset import contrast
from codbench.lib.dataset.manifest import ATTRIBUTES

if t.TYPE_CHECKING:
    from codbench.config.bench.stats import StatsConfig

Provenance = t.Literal["computed", "annotated"]

COMPUTABLE = ("MO", "BO", "SO", "OV", "IB")
ANNOTATED_ONLY = ("OC", "SC")

BIG_OBJECT = 0.5
SMALL_OBJECT = 0.1
BOUNDARY_CHI2 = 0.9

# 4-connectivity
_CROSS = ndimage.generate_binary_structure(2, 1)


@dataclass(frozen=True)
class AttributeSet:
    """Attribute flags of one image.

    A flag is True, False or None (unknown: annotated-only flag without
    an annotation, or IB without image data). `provenance` tells where
    each known flag came from.
    """

    flags: t.Mapping[str, bool | None]
    provenance: t.Mapping[str, Provenance]

    def __getitem__(self, flag: str) -> bool | None:
        return self.flags[flag]

    @property
    def present(self) -> tuple[str, ...]:
        return tuple(f for f in ATTRIBUTES if self.flags.get(f))

    @property
    def unknown(self) -> tuple[str, ...]:
        return tuple(f for f in ATTRIBUTES if self.flags.get(f) is None)

    def with_annotations(self, annotated: t.Mapping[str, bool]) -> AttributeSet:
        """Fill flags from annotations. Computed flags win over annotated
        ones; annotations only fill what could not be computed."""
        flags = dict(self.flags)
        provenance = dict(self.provenance)
        for flag, value in annotated.items():
            if flag not in flags:
                raise ValidationError(reason=f"unknown attribute flag {flag!r}")
            if flags[flag] is None:
                flags[flag] = bool(value)
                provenance[flag] = "annotated"
        return AttributeSet(flags=flags, provenance=provenance)


def count_objects(mask: npt.NDArray[np.bool_]) -> int:
    """Number of 4-connected foreground components."""
    _, n = ndimage.label(mask, structure=_CROSS)
    return int(n)


def touches_border(mask: npt.NDArray[np.bool_]) -> bool:
    return bool(mask[0, :].any() or mask[-1, :].any() or mask[:, 0].any() or mask[:, -1].any())


def compute_attributes(
    mask: npt.ArrayLike,
    image: npt.ArrayLike | None = None,
    config: StatsConfig | None = None,
) -> AttributeSet:
    """Computable attribute flags of one ground truth.

    - MO: at least two 4-connected objects.
    - BO: object/image area ratio at or above 0.5.
    - SO: ratio at or below 0.1.
    - OV: the object touches the image border.
    - IB: chi-square between the object's and its surrounding band's RGB
      histograms below 0.9; needs the image.

    OC and SC are left unknown. An empty mask sets every computed flag
    False.

    Args:
        mask: 2-D binary ground truth.
        image: Optional H x W x 3 8-bit image.
        config: Thresholds; module defaults when omitted.

    Returns:
        The attribute set.
    """
    g = np.asarray(mask).astype(bool)
    if g.ndim != 2:
        raise ValidationError(reason=f"expected a 2-D mask, got shape {g.shape}")
    big = config.big_object if config else BIG_OBJECT
    small = config.small_object if config else SMALL_OBJECT
    ib_limit = config.boundary_chi2 if config else BOUNDARY_CHI2

    ratio = float(g.mean())
    empty = not g.any()
    flags: dict[str, bool | None] = {
        "MO": count_objects(g) >= 2,
        "BO": not empty and ratio >= big,
        "SO": not empty and ratio <= small,
        "OV": touches_border(g),
        "OC": None,
        "SC": None,
        "IB": None,
    }
    if empty:
        flags["IB"] = False
    elif image is not None:
        kwargs = {}
        if config is not None:
            kwargs = {"width": config.band_width, "bins": config.hist_bins, "eps": config.chi2_eps}
        chi2 = contrast.surround_contrast(image, g, **kwargs)
        # full-frame objects have no surrounding band
        flags["IB"] = chi2 is not None and chi2 < ib_limit

    provenance: dict[str, Provenance] = {f: "computed" for f, v in flags.items() if v is not None}
    return AttributeSet(flags=flags, provenance=provenance)


def co_occurrence(sets: t.Iterable[AttributeSet]) -> dict[str, int]:
    """Pairwise co-attribute counts keyed `A+B` in flag order."""
    counts = {f"{a}+{b}": 0 for a, b in itertools.combinations(ATTRIBUTES, 2)}
    for attrs in sets:
        for a, b in itertools.combinations(attrs.present, 2):
            counts[f"{a}+{b}"] += 1
    return counts
