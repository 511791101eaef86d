from __future__ import annotations

import collections
import concurrent.futures
import math
import typing as t

import numpy as np
import numpy.typing as npt

from codbench.exceptions import DataIOError
from codbench.helper.mixin import LoggingMixin
from codbench.lib import imageio
from codbench.lib.dataset import contrast
from codbench.lib.dataset.attributes import ANNOTATED_ONLY
from codbench.lib.dataset.attributes import AttributeSet
from codbench.lib.dataset.attributes import co_occurrence
from codbench.lib.dataset.attributes import compute_attributes
from codbench.lib.dataset.manifest import ATTRIBUTES
from codbench.lib.dataset.manifest import DatasetManifest
from codbench.lib.dataset.manifest import ManifestRecord
from codbench.lib.tensor import Array
from codbench.valueobj import BaseValueObject

if t.TYPE_CHECKING:
    from codbench.config.bench.stats import StatsConfig

SCHEMA_VERSION = 1
SIZE_BINS = 20
HEATMAP_SIZE = 256
# distance from the centre to a corner in normalized coordinates
_MAX_OFFSET = math.sqrt(2.0) / 2.0


class Distribution(BaseValueObject):
    """Values in [0, 1] with a uniform histogram and summary."""

    values: tuple[float, ...]
    histogram: tuple[int, ...]
    bin_edges: tuple[float, ...]
    min: float | None
    mean: float | None
    max: float | None

    @classmethod
    def of(cls, values: t.Sequence[float], bins: int = SIZE_BINS) -> Distribution:
        arr = np.asarray(values, dtype=np.float64)
        counts, edges = np.histogram(arr, bins=bins, range=(0.0, 1.0))
        return cls(
            values=tuple(float(v) for v in arr),
            histogram=tuple(int(c) for c in counts),
            bin_edges=tuple(float(e) for e in edges),
            min=float(arr.min()) if arr.size else None,
            mean=math.fsum(arr) / arr.size if arr.size else None,
            max=float(arr.max()) if arr.size else None,
        )


class ContrastStats(BaseValueObject):
    global_contrast: Distribution
    local_contrast: Distribution
    skipped: int


class CenterBias(BaseValueObject):
    distances: Distribution
    skipped_empty: int


class ResolutionCount(BaseValueObject):
    height: int
    width: int
    count: int


class AttributeSummary(BaseValueObject):
    """Per-flag image counts, unknown-flag gaps and pairwise
    co-occurrence counts."""

    coverage: dict[str, int]
    gaps: dict[str, int]
    co_occurrence: dict[str, int]


class ImageStats(BaseValueObject):
    name: str
    height: int
    width: int
    ratio: float
    global_contrast: float | None
    local_contrast: float | None
    center_distance: float | None
    attributes: dict[str, bool | None]


class DatasetStats(BaseValueObject):
    kind: t.Literal["dataset-stats"] = "dataset-stats"
    schema_version: int = SCHEMA_VERSION
    dataset: str
    count: int
    object_size: Distribution
    contrast: ContrastStats
    center_bias: CenterBias
    resolutions: tuple[ResolutionCount, ...]
    attributes: AttributeSummary
    images: tuple[ImageStats, ...]


class DatasetAnalysis(t.NamedTuple):
    stats: DatasetStats
    heatmap: Array


# ============================================================================
# Per-image measurements
# ============================================================================


def object_ratio(mask: npt.ArrayLike) -> float:
    """Foreground share of the image."""
    return float(np.asarray(mask, dtype=bool).mean())


def centroid_distance(mask: npt.ArrayLike) -> float | None:
    """Distance from the object centroid to the image centre, scaled so
    that a corner is 1; None for an empty mask.

    Pixel centres span [0, 1] on both axes, so a mask centred exactly
    scores 0 and a single corner pixel scores 1.
    """
    g = np.asarray(mask, dtype=bool)
    if not g.any():
        return None
    h, w = g.shape
    rows, cols = np.nonzero(g)
    cy = rows.mean() / (h - 1) if h > 1 else 0.5
    cx = cols.mean() / (w - 1) if w > 1 else 0.5
    return float(math.hypot(cy - 0.5, cx - 0.5) / _MAX_OFFSET)


def average_mask(masks: t.Iterable[npt.ArrayLike], size: int = HEATMAP_SIZE) -> Array:
    """Mean of all masks resized to a common `size x size` grid."""
    total = np.zeros((size, size))
    n = 0
    for mask in masks:
        total += np.clip(imageio.resize_map(np.asarray(mask, dtype=np.float64), (size, size)), 0.0, 1.0)
        n += 1
    return total / n if n else total


class _Measured(t.NamedTuple):
    image: ImageStats
    attributes: AttributeSet
    heat: Array


# ============================================================================
# Analyzer
# ============================================================================


class DatasetAnalyzer(LoggingMixin):
    """Dataset statistics: object size, global/local contrast, center
    bias, resolutions and attributes.

    Images are read and measured concurrently; every reduction walks the
    records in name order, so results do not depend on manifest order or
    the worker count.

    Example:
        ```python
        manifest = load_manifest("datasets/CAMO/test")
        analysis = DatasetAnalyzer(threads=4).analyze(manifest)
        analysis.stats.object_size.mean
        ```
    """

    __logtag__ = "codbench.lib.dataset.stats"

    def __init__(self, config: StatsConfig | None = None, *, threads: int = 1) -> None:
        super().__init__()
        self.config = config
        self.threads = threads

    @property
    def bins(self) -> int:
        return self.config.size_bins if self.config else SIZE_BINS

    @property
    def heatmap_size(self) -> int:
        return self.config.heatmap_size if self.config else HEATMAP_SIZE

    def analyze(self, manifest: DatasetManifest) -> DatasetAnalysis:
        """Measure every record and aggregate.

        Raises:
            DataIOError: When a mask or image cannot be read.
        """
        records = manifest.ordered()
        if not records:
            self.logger.warning(f"Dataset {manifest.name} is empty; emitting an empty report")
        measured = self._measure_all(records)
        bins = self.bins

        sizes = [m.image.ratio for m in measured]
        globals_ = [m.image.global_contrast for m in measured if m.image.global_contrast is not None]
        locals_ = [m.image.local_contrast for m in measured if m.image.local_contrast is not None]
        distances = [m.image.center_distance for m in measured if m.image.center_distance is not None]

        resolutions = collections.Counter((m.image.height, m.image.width) for m in measured)
        attrs = [m.attributes for m in measured]
        stats = DatasetStats(
            dataset=manifest.name,
            count=len(measured),
            object_size=Distribution.of(sizes, bins),
            contrast=ContrastStats(
                global_contrast=Distribution.of(globals_, bins),
                local_contrast=Distribution.of(locals_, bins),
                skipped=len(measured) - len(globals_),
            ),
            center_bias=CenterBias(
                distances=Distribution.of(distances, bins),
                skipped_empty=len(measured) - len(distances),
            ),
            resolutions=tuple(
                ResolutionCount(height=h, width=w, count=c) for (h, w), c in sorted(resolutions.items())
            ),
            attributes=AttributeSummary(
                coverage={f: sum(1 for a in attrs if a.flags.get(f)) for f in ATTRIBUTES},
                gaps={f: sum(1 for a in attrs if a.flags.get(f) is None) for f in ATTRIBUTES},
                co_occurrence=co_occurrence(attrs),
            ),
            images=tuple(m.image for m in measured),
        )
        heatmap = average_mask((m.heat for m in measured), self.heatmap_size)

        gaps = {f: stats.attributes.gaps[f] for f in ANNOTATED_ONLY if stats.attributes.gaps[f]}
        if gaps:
            self.logger.info(f"Annotated-only attributes missing for {gaps}")
        self.logger.info(f"Analyzed {stats.count} images of dataset {manifest.name}")
        return DatasetAnalysis(stats=stats, heatmap=heatmap)

    def _measure_all(self, records: t.Sequence[ManifestRecord]) -> list[_Measured]:
        if self.threads <= 1 or len(records) <= 1:
            return [self._measure(r) for r in records]
        with concurrent.futures.ThreadPoolExecutor(max_workers=self.threads) as pool:
            return list(pool.map(self._measure, records))

    def _measure(self, record: ManifestRecord) -> _Measured:
        cfg = self.config
        threshold = cfg.mask_threshold if cfg else imageio.MASK_THRESHOLD
        mask = imageio.read_mask(record.mask, threshold)
        rgb = imageio.read_rgb(record.image) if record.image is not None else None
        if rgb is not None and rgb.shape[:2] != mask.shape:
            raise DataIOError(path=str(record.image), reason=f"image size {rgb.shape[:2]} differs from mask {mask.shape}")

        kwargs: dict[str, t.Any] = {}
        if cfg is not None:
            kwargs = {"bins": cfg.hist_bins, "eps": cfg.chi2_eps}
        width = cfg.band_width if cfg else contrast.BANDWIDTH
        attributes = compute_attributes(mask, rgb, cfg).with_annotations(record.attributes)
        image = ImageStats(
            name=record.name,
            height=mask.shape[0],
            width=mask.shape[1],
            ratio=object_ratio(mask),
            global_contrast=contrast.global_contrast(rgb, mask, **kwargs) if rgb is not None else None,
            local_contrast=contrast.local_contrast(rgb, mask, width=width, **kwargs) if rgb is not None else None,
            center_distance=centroid_distance(mask),
            attributes=dict(attributes.flags),
        )
        size = self.heatmap_size
        heat = np.clip(imageio.resize_map(mask.astype(np.float64), (size, size)), 0.0, 1.0)
        return _Measured(image=image, attributes=attributes, heat=heat)


# ============================================================================
# Single-statistic entry points
# ============================================================================


def object_size_stats(manifest: DatasetManifest, config: StatsConfig | None = None) -> Distribution:
    """Distribution of per-image object/image area ratios."""
    return DatasetAnalyzer(config).analyze(manifest).stats.object_size


def contrast_stats(manifest: DatasetManifest, config: StatsConfig | None = None) -> ContrastStats:
    """Global and local contrast distributions.

    Raises:
        DataIOError: When a record has no image.
    """
    for record in manifest.records:
        if record.image is None:
            raise DataIOError(path=str(record.mask), reason=f"record {record.name} has no image")
    return DatasetAnalyzer(config).analyze(manifest).stats.contrast


def center_bias(manifest: DatasetManifest, config: StatsConfig | None = None) -> tuple[CenterBias, Array]:
    """Centroid-offset distribution and the average-mask heatmap."""
    analysis = DatasetAnalyzer(config).analyze(manifest)
    return analysis.stats.center_bias, analysis.heatmap
