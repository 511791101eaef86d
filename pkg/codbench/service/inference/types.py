from __future__ import annotations

import pathlib
import typing as t


class InferenceResult(t.NamedTuple):
    """Prediction files written by one inference run, in name order."""

    outputs: list[pathlib.Path]
    weights: pathlib.Path | None
    variant: str
