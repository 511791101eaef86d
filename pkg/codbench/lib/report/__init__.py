from __future__ import annotations

from codbench.lib.report.render import FORMATS
from codbench.lib.report.render import Document
from codbench.lib.report.render import Format
from codbench.lib.report.render import ReportRenderer
from codbench.lib.report.render import table_view
from codbench.lib.report.table import BenchmarkTable
from codbench.lib.report.table import Column
from codbench.lib.report.table import TableRow
from codbench.lib.report.table import class_table
from codbench.lib.report.table import dataset_table
from codbench.lib.report.table import summary_table

__all__ = [
    "FORMATS",
    "BenchmarkTable",
    "Column",
    "Document",
    "Format",
    "ReportRenderer",
    "TableRow",
    "class_table",
    "dataset_table",
    "summary_table",
    "table_view",
]
