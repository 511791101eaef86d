from __future__ import annotations

import math
import typing as t

import numpy as np
import numpy.typing as npt

from codbench.exceptions import ValidationError
from codbench.valueobj import BaseValueObject


class GeneralizationRow(BaseValueObject):
    """One trained-on dataset.

    `drop` is the relative loss when testing elsewhere,
    `(self - mean_others) / self`; negative when the model does better on
    the other datasets. None when undefined (single dataset or zero self
    score).
    """

    dataset: str
    self_score: float
    mean_others: float | None
    drop: float | None


class GeneralizationTable(BaseValueObject):
    """Cross-dataset scores, rows trained-on and columns tested-on.

    `mean_others_column` is the per-column mean over the rows trained on
    other datasets.
    """

    kind: t.Literal["generalization"] = "generalization"
    schema_version: int = 1
    metric: str
    datasets: tuple[str, ...]
    matrix: tuple[tuple[float, ...], ...]
    rows: tuple[GeneralizationRow, ...]
    mean_others_column: tuple[float | None, ...]


def relative_drop(self_score: float, mean_others: float | None) -> float | None:
    if mean_others is None or self_score == 0:
        return None
    return (self_score - mean_others) / self_score


def generalization_table(
    scores: npt.ArrayLike,
    datasets: t.Sequence[str] | None = None,
    *,
    metric: str = "s_alpha",
) -> GeneralizationTable:
    """Self, mean-others and drop per trained-on dataset.

    Args:
        scores: Square matrix; entry (i, j) is the score of the model
            trained on dataset i and tested on dataset j.
        datasets: Names of the datasets; `D0, D1, ...` when omitted.
        metric: Name of the metric the scores belong to.

    Returns:
        The table.

    Raises:
        ValidationError: On a non-square or non-finite matrix, or a name
            count that does not match it.

    Example:
        ```python
        table = generalization_table([[0.803, 0.702], [0.742, 0.700]], ["CAMO", "COD10K"])
        table.rows[0].drop  # 0.1258
        ```
    """
    m = np.asarray(scores, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise ValidationError(reason=f"score matrix must be square and non-empty, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValidationError(reason="score matrix holds NaN or Inf")
    n = m.shape[0]
    names = tuple(datasets) if datasets is not None else tuple(f"D{i}" for i in range(n))
    if len(names) != n:
        raise ValidationError(reason=f"{len(names)} dataset names for a {n}x{n} matrix")

    rows = []
    for i, name in enumerate(names):
        others = [float(m[i, j]) for j in range(n) if j != i]
        mean_others = math.fsum(others) / len(others) if others else None
        self_score = float(m[i, i])
        rows.append(
            GeneralizationRow(
                dataset=name,
                self_score=self_score,
                mean_others=mean_others,
                drop=relative_drop(self_score, mean_others),
            )
        )
    column = tuple(
        math.fsum(float(m[i, j]) for i in range(n) if i != j) / (n - 1) if n > 1 else None for j in range(n)
    )
    return GeneralizationTable(
        metric=metric,
        datasets=names,
        matrix=tuple(tuple(float(v) for v in row) for row in m),
        rows=tuple(rows),
        mean_others_column=column,
    )
