from __future__ import annotations

import pathlib
import typing as t

from codbench.lib.dataset import DatasetStats


class StatsResult(t.NamedTuple):
    stats: DatasetStats
    files: list[pathlib.Path]
    heatmap: pathlib.Path
