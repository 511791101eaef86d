from __future__ import annotations

import pathlib
import typing as t

from codbench.lib.metrics import MetricReport


class EvaluationResult(t.NamedTuple):
    report: MetricReport
    files: list[pathlib.Path]
