from __future__ import annotations

import os
import pathlib
import typing as t

import typing_extensions as te

import pydantic as pyd

from codbench.exceptions import ValidationError
from codbench.helper.specfile import load_spec
from codbench.lib.metrics import GeneralizationTable
from codbench.valueobj import BaseValueObject

Metric = t.Literal["s_alpha", "e_phi", "f_beta_w", "mae"]


class CrossRun(BaseValueObject):
    """One (trained-on, tested-on) cell and where its score comes from:
    a literal `score`, a saved evaluation `report`, or a `pred_dir` to
    evaluate against `gt_root`."""

    trained_on: str
    tested_on: str
    score: float | None = None
    report: pathlib.Path | None = None
    pred_dir: pathlib.Path | None = None
    gt_root: pathlib.Path | None = None

    @pyd.model_validator(mode="after")
    def _one_source(self) -> te.Self:
        sources = [self.score is not None, self.report is not None, self.pred_dir is not None]
        if sum(sources) != 1:
            raise ValidationError(
                reason=f"run {self.trained_on}->{self.tested_on} needs exactly one of score, report, pred_dir"
            )
        if (self.pred_dir is None) != (self.gt_root is None):
            raise ValidationError(reason=f"run {self.trained_on}->{self.tested_on}: pred_dir and gt_root go together")
        return self

    def resolved(self, base: pathlib.Path) -> CrossRun:
        """Copy with relative paths taken against `base`."""
        paths = {
            k: base / v
            for k in ("report", "pred_dir", "gt_root")
            if (v := getattr(self, k)) is not None and not v.is_absolute()
        }
        return self.model_copy(update=paths)


class CrossDataSpec(BaseValueObject):
    """A square score matrix, given directly or as a list of runs."""

    metric: Metric = "s_alpha"
    datasets: tuple[str, ...] | None = None
    matrix: tuple[tuple[float, ...], ...] | None = None
    runs: tuple[CrossRun, ...] = ()

    @pyd.model_validator(mode="after")
    def _one_form(self) -> te.Self:
        if (self.matrix is None) == (not self.runs):
            raise ValidationError(reason="give either a matrix or a list of runs")
        return self

    @classmethod
    def from_file(cls, path: str | os.PathLike[str]) -> CrossDataSpec:
        spec = load_spec(cls, path)
        base = pathlib.Path(path).parent
        return spec.model_copy(update={"runs": tuple(r.resolved(base) for r in spec.runs)})


class CrossDataResult(t.NamedTuple):
    table: GeneralizationTable
    files: list[pathlib.Path]
