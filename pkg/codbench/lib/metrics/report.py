from __future__ import annotations

import collections
import math
import typing as t

from codbench.lib.metrics.measures import MetricScores
from codbench.valueobj import BaseValueObject

SCHEMA_VERSION = 1

# column order of every table
METRICS = ("s_alpha", "e_phi", "f_beta_w", "mae")
METRIC_LABELS = {"s_alpha": "S_α↑", "e_phi": "E_φ↑", "f_beta_w": "F_β^w↑", "mae": "M↓"}
HIGHER_IS_BETTER = {"s_alpha": True, "e_phi": True, "f_beta_w": True, "mae": False}


class MetricSummary(BaseValueObject):
    """Arithmetic means over `count` images; None when nothing was
    aggregated."""

    count: int
    s_alpha: float | None = None
    e_phi: float | None = None
    f_beta_w: float | None = None
    mae: float | None = None

    @classmethod
    def aggregate(cls, scores: t.Sequence[MetricScores]) -> MetricSummary:
        if not scores:
            return cls(count=0)
        n = len(scores)
        # fsum is exactly rounded, so the mean does not depend on order
        means = {m: math.fsum(getattr(s, m) for s in scores) / n for m in METRICS}
        return cls(count=n, **means)

    def value(self, metric: str) -> float | None:
        return t.cast("float | None", getattr(self, metric))


class ImageScore(BaseValueObject):
    name: str
    super_class: str
    sub_class: str
    s_alpha: float
    e_phi: float
    f_beta_w: float
    mae: float

    @property
    def scores(self) -> MetricScores:
        return MetricScores(self.s_alpha, self.e_phi, self.f_beta_w, self.mae)

    @property
    def class_key(self) -> str:
        return f"{self.super_class}/{self.sub_class}"


class MetricReport(BaseValueObject):
    """Evaluation of one model on one dataset.

    Attributes:
        schema_version: Version of this JSON layout.
        dataset: Dataset name.
        model: Model or run name.
        overall: Mean over all images.
        super_classes: Means per super-class.
        sub_classes: Means per sub-class, keyed `Super/Sub`.
        images: Per-image scores in name order.
        missing: Ground-truth names skipped for lack of a prediction.
    """

    kind: t.Literal["metric-report"] = "metric-report"
    schema_version: int = SCHEMA_VERSION
    dataset: str
    model: str = ""
    overall: MetricSummary
    super_classes: dict[str, MetricSummary]
    sub_classes: dict[str, MetricSummary]
    images: tuple[ImageScore, ...]
    missing: tuple[str, ...] = ()

    @classmethod
    def from_images(
        cls,
        images: t.Iterable[ImageScore],
        *,
        dataset: str,
        model: str = "",
        missing: t.Iterable[str] = (),
    ) -> MetricReport:
        ordered = tuple(sorted(images, key=lambda s: s.name))
        supers: dict[str, list[MetricScores]] = collections.defaultdict(list)
        subs: dict[str, list[MetricScores]] = collections.defaultdict(list)
        for image in ordered:
            supers[image.super_class].append(image.scores)
            subs[image.class_key].append(image.scores)
        return cls(
            dataset=dataset,
            model=model,
            overall=MetricSummary.aggregate([s.scores for s in ordered]),
            super_classes={k: MetricSummary.aggregate(v) for k, v in sorted(supers.items())},
            sub_classes={k: MetricSummary.aggregate(v) for k, v in sorted(subs.items())},
            images=ordered,
            missing=tuple(sorted(missing)),
        )
