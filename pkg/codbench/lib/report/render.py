from __future__ import annotations

import csv
import io
import os
import pathlib
import typing as t

import jinja2
import pydantic as pyd

from codbench.exceptions import DataIOError
from codbench.exceptions import ValidationError
from codbench.helper.mixin import LoggingMixin
from codbench.lib.dataset.stats import DatasetStats
from codbench.lib.metrics.generalization import GeneralizationTable
from codbench.lib.metrics.report import METRIC_LABELS
from codbench.lib.metrics.report import METRICS
from codbench.lib.metrics.report import MetricReport
from codbench.lib.report.table import BenchmarkTable
from codbench.lib.report.table import class_table
from codbench.lib.report.table import summary_table
from codbench.utils import fmt_percent
from codbench.utils import fmt_score

SCHEMA_VERSION = 1
Format = t.Literal["json", "csv", "markdown"]
FORMATS: tuple[Format, ...] = ("json", "csv", "markdown")
SUFFIXES: dict[Format, str] = {"json": ".json", "csv": ".csv", "markdown": ".md"}

Document = t.Annotated[
    MetricReport | DatasetStats | BenchmarkTable | GeneralizationTable,
    pyd.Field(discriminator="kind"),
]
_documents: pyd.TypeAdapter[Document] = pyd.TypeAdapter(Document)

LEGEND = "S_α: structure measure, E_φ: mean enhanced-alignment measure, F_β^w: weighted F-measure, M: mean absolute error."


class TableView(t.NamedTuple):
    title: str
    header: list[str]
    align: list[str]
    rows: list[list[str]]


def _view(title: str, header: t.Sequence[str], rows: t.Sequence[t.Sequence[str]], *, left: int = 1) -> TableView:
    align = [":---"] * left + ["---:"] * (len(header) - left)
    return TableView(title, list(header), align, [list(r) for r in rows])


def table_view(table: BenchmarkTable) -> TableView:
    """Cells of a benchmark table: 3-decimal half-up scores, the best
    value of every column in bold."""
    best = table.best()
    grouped = len(table.groups) > 1 or any(table.groups)
    with_count = any(r.count is not None for r in table.rows)
    header = [table.row_header] + (["N"] if with_count else [])
    header += [f"{c.group} {c.label}" if grouped else c.label for c in table.columns]
    rows = []
    for row in table.rows:
        cells = [row.label] + ([str(row.count) if row.count is not None else ""] if with_count else [])
        for col in table.columns:
            value = row.values.get(col.key)
            text = fmt_score(value)
            cells.append(f"**{text}**" if value is not None and value == best[col.key] else text)
        rows.append(cells)
    return _view(table.title, header, rows, left=2 if with_count else 1)


class ReportRenderer(LoggingMixin):
    """Renders reports, statistics and tables as JSON, CSV or markdown,
    and reloads saved JSON documents.

    JSON is the source of truth: re-rendering a saved JSON document gives
    the same markdown as rendering the original object.
    """

    __logtag__ = "codbench.lib.report"

    def __init__(self) -> None:
        super().__init__()
        self.env = jinja2.Environment(
            loader=jinja2.PackageLoader("codbench.lib.report", "templates"),
            autoescape=False,
            trim_blocks=True,
            lstrip_blocks=True,
            keep_trailing_newline=True,
            undefined=jinja2.StrictUndefined,
        )

    # ============================================================================
    # Formats
    # ============================================================================

    def render(self, doc: Document, fmt: Format) -> str:
        if fmt == "json":
            return self.json(doc)
        if fmt == "csv":
            return self.csv(doc)
        return self.markdown(doc)

    def json(self, doc: Document) -> str:
        return doc.model_dump_json(indent=2) + "\n"

    def markdown(self, doc: Document) -> str:
        if isinstance(doc, MetricReport):
            return self.env.get_template("metric_report.md.j2").render(
                report=doc,
                overall=table_view(summary_table(doc)),
                supers=table_view(class_table(doc, "super")),
                subs=table_view(class_table(doc, "sub")),
                legend=LEGEND,
            )
        if isinstance(doc, BenchmarkTable):
            return self.env.get_template("benchmark_table.md.j2").render(view=table_view(doc), legend=LEGEND)
        if isinstance(doc, GeneralizationTable):
            return self._generalization_md(doc)
        return self._stats_md(doc)

    def csv(self, doc: Document) -> str:
        """Machine-readable rows at full precision."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        if isinstance(doc, MetricReport):
            writer.writerow(["name", "super_class", "sub_class", *METRICS])
            for img in doc.images:
                writer.writerow([img.name, img.super_class, img.sub_class, *(repr(getattr(img, m)) for m in METRICS)])
        elif isinstance(doc, BenchmarkTable):
            writer.writerow([doc.row_header, "count", *(c.key for c in doc.columns)])
            for row in doc.rows:
                values = [row.values.get(c.key) for c in doc.columns]
                writer.writerow([row.label, "" if row.count is None else row.count, *(_num(v) for v in values)])
        elif isinstance(doc, GeneralizationTable):
            writer.writerow(["trained_on", *doc.datasets, "self", "mean_others", "drop"])
            for name, scores, row in zip(doc.datasets, doc.matrix, doc.rows, strict=True):
                writer.writerow([name, *(_num(v) for v in scores), _num(row.self_score), _num(row.mean_others), _num(row.drop)])
        else:
            dists = {
                "object_size": doc.object_size,
                "global_contrast": doc.contrast.global_contrast,
                "local_contrast": doc.contrast.local_contrast,
                "center_distance": doc.center_bias.distances,
            }
            edges = doc.object_size.bin_edges
            writer.writerow(["bin_low", "bin_high", *dists])
            for i in range(len(edges) - 1):
                writer.writerow([_num(edges[i]), _num(edges[i + 1]), *(d.histogram[i] for d in dists.values())])
        return buf.getvalue()

    # ============================================================================
    # Files
    # ============================================================================

    def write(
        self,
        doc: Document,
        out_dir: str | os.PathLike[str],
        stem: str,
        formats: t.Iterable[Format] = FORMATS,
    ) -> list[pathlib.Path]:
        """Write `stem.json`, `stem.csv` and/or `stem.md` into `out_dir`.

        Raises:
            DataIOError: When a file cannot be written.
        """
        out = pathlib.Path(out_dir)
        written = []
        for fmt in formats:
            path = out / f"{stem}{SUFFIXES[fmt]}"
            try:
                out.mkdir(parents=True, exist_ok=True)
                path.write_text(self.render(doc, fmt), encoding="utf-8")
            except OSError as e:
                raise DataIOError(path=str(path), reason=str(e)) from e
            self.logger.debug(f"Wrote {path}")
            written.append(path)
        return written

    def load(self, path: str | os.PathLike[str]) -> Document:
        """Reload a JSON document written by `write`.

        Raises:
            DataIOError: When the file cannot be read.
            ValidationError: On malformed content or an unsupported
                schema version.
        """
        path = pathlib.Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as e:
            raise DataIOError(path=str(path), reason=str(e)) from e
        try:
            doc = _documents.validate_json(text)
        except pyd.ValidationError as e:
            raise ValidationError.from_pydantic_validation_err(e) from e
        if doc.schema_version != SCHEMA_VERSION:
            raise ValidationError(reason=f"{path}: schema version {doc.schema_version} is not supported")
        return doc

    def rerender(self, path: str | os.PathLike[str], fmt: Format = "markdown") -> str:
        return self.render(self.load(path), fmt)

    # ============================================================================
    # Private Methods
    # ============================================================================

    def _generalization_md(self, doc: GeneralizationTable) -> str:
        label = METRIC_LABELS.get(doc.metric, doc.metric)
        matrix_rows = [[name, *(fmt_score(v) for v in scores)] for name, scores in zip(doc.datasets, doc.matrix, strict=True)]
        matrix_rows.append(["Mean others", *(fmt_score(v) for v in doc.mean_others_column)])
        summary_rows = [
            [r.dataset, fmt_score(r.self_score), fmt_score(r.mean_others), fmt_percent(r.drop)] for r in doc.rows
        ]
        return self.env.get_template("generalization.md.j2").render(
            doc=doc,
            matrix=_view(label, ["Trained on / tested on", *doc.datasets], matrix_rows),
            summary=_view(label, ["Trained on", "Self", "Mean others", "Drop↓"], summary_rows),
        )

    def _stats_md(self, stats: DatasetStats) -> str:
        dists = [
            ("Object size", stats.object_size),
            ("Global contrast", stats.contrast.global_contrast),
            ("Local contrast", stats.contrast.local_contrast),
            ("Center distance", stats.center_bias.distances),
        ]
        summary = [[name, str(len(d.values)), fmt_score(d.min), fmt_score(d.mean), fmt_score(d.max)] for name, d in dists]
        resolutions = [[f"{r.width}x{r.height}", str(r.count)] for r in stats.resolutions]
        attributes = [
            [flag, str(stats.attributes.coverage[flag]), str(stats.attributes.gaps[flag])]
            for flag in stats.attributes.coverage
        ]
        pairs = [[pair, str(n)] for pair, n in stats.attributes.co_occurrence.items() if n]
        return self.env.get_template("dataset_stats.md.j2").render(
            stats=stats,
            summary=_view("", ["Statistic", "N", "Min", "Mean", "Max"], summary),
            resolutions=_view("", ["Resolution", "Images"], resolutions),
            attributes=_view("", ["Attribute", "Images", "Unknown"], attributes),
            pairs=_view("", ["Pair", "Images"], pairs),
        )


def _num(value: float | None) -> str:
    return "" if value is None else repr(float(value))
