from __future__ import annotations

import typing as t

from codbench.exceptions import ValidationError
from codbench.lib.metrics.report import HIGHER_IS_BETTER
from codbench.lib.metrics.report import METRIC_LABELS
from codbench.lib.metrics.report import METRICS
from codbench.lib.metrics.report import MetricReport
from codbench.lib.metrics.report import MetricSummary
from codbench.valueobj import BaseValueObject

SCHEMA_VERSION = 1
ClassLevel = t.Literal["super", "sub"]


class Column(BaseValueObject):
    """One metric of one group (dataset, or empty for single-group
    tables). Keys are `group:metric` or just `metric`."""

    group: str
    metric: str

    @property
    def key(self) -> str:
        return f"{self.group}:{self.metric}" if self.group else self.metric

    @property
    def label(self) -> str:
        return METRIC_LABELS.get(self.metric, self.metric)


class TableRow(BaseValueObject):
    label: str
    count: int | None = None
    values: dict[str, float | None]


class BenchmarkTable(BaseValueObject):
    """Rows of runs or classes against metric columns.

    Columns come in the fixed order S_α, E_φ, F_β^w, M within each group,
    groups in the order given. The best value of each column (highest, or
    lowest for MAE) is marked when rendering.
    """

    kind: t.Literal["benchmark-table"] = "benchmark-table"
    schema_version: int = SCHEMA_VERSION
    title: str
    row_header: str = "Model"
    columns: tuple[Column, ...]
    rows: tuple[TableRow, ...]

    @property
    def groups(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for col in self.columns:
            seen.setdefault(col.group, None)
        return tuple(seen)

    def best(self) -> dict[str, float | None]:
        """Best value of every column; None for all-empty columns or
        single-row tables."""
        out: dict[str, float | None] = {}
        for col in self.columns:
            values = [v for r in self.rows if (v := r.values.get(col.key)) is not None]
            if len(self.rows) < 2 or not values:
                out[col.key] = None
            else:
                out[col.key] = max(values) if HIGHER_IS_BETTER.get(col.metric, True) else min(values)
        return out


def _metric_columns(group: str = "") -> tuple[Column, ...]:
    return tuple(Column(group=group, metric=m) for m in METRICS)


def _values(summary: MetricSummary, group: str = "") -> dict[str, float | None]:
    return {Column(group=group, metric=m).key: summary.value(m) for m in METRICS}


def dataset_table(reports: t.Sequence[MetricReport], *, title: str = "Quantitative results") -> BenchmarkTable:
    """Models as rows, datasets as column groups.

    Raises:
        ValidationError: When one (model, dataset) pair appears twice.
    """
    datasets: dict[str, None] = {}
    models: dict[str, dict[str, float | None]] = {}
    for report in reports:
        datasets.setdefault(report.dataset, None)
        row = models.setdefault(report.model or "model", {})
        values = _values(report.overall, report.dataset)
        if any(k in row for k in values):
            raise ValidationError(reason=f"duplicate report for model {report.model!r} on {report.dataset!r}")
        row.update(values)
    columns = tuple(c for d in datasets for c in _metric_columns(d))
    rows = tuple(
        TableRow(label=model, values={c.key: values.get(c.key) for c in columns}) for model, values in models.items()
    )
    return BenchmarkTable(title=title, columns=columns, rows=rows)


def class_table(report: MetricReport, level: ClassLevel = "sub") -> BenchmarkTable:
    """Classes of one report as rows."""
    summaries = report.super_classes if level == "super" else report.sub_classes
    header = "Super-class" if level == "super" else "Sub-class"
    rows = tuple(TableRow(label=name, count=s.count, values=_values(s)) for name, s in summaries.items())
    title = f"{report.dataset} per {header.lower()}" + (f" ({report.model})" if report.model else "")
    return BenchmarkTable(title=title, row_header=header, columns=_metric_columns(), rows=rows)


def summary_table(report: MetricReport) -> BenchmarkTable:
    label = report.model or "model"
    row = TableRow(label=label, count=report.overall.count, values=_values(report.overall))
    return BenchmarkTable(title=f"{report.dataset} overall", columns=_metric_columns(), rows=(row,))
