from __future__ import annotations

import os
import pathlib
import re
import typing as t

import pydantic as pyd

from codbench.config.model.sinet import SinetConfig
from codbench.helper.specfile import load_spec
from codbench.lib.metrics import MetricReport
from codbench.lib.report import BenchmarkTable
from codbench.valueobj import BaseValueObject

GridMode = t.Literal["one-axis", "cartesian"]
ConvStyle = t.Literal["symmetric", "asymmetric"]

_REVERSE = re.compile(r"^[01]{3}$")


class AblationGrid(BaseValueObject):
    """Values to try per architecture axis.

    In `one-axis` mode every value is tried on its own against the
    configured architecture; `cartesian` mode trains every combination.
    Group triples may be written `32;8;1` as well as `[32, 8, 1]`.
    """

    mode: GridMode = "one-axis"
    decoder: tuple[t.Literal["ncd", "pd"], ...] = ("pd", "ncd")
    tem_style: tuple[ConvStyle, ...] = ("symmetric", "asymmetric")
    reverse: tuple[str, ...] = ("000", "100", "110", "111")
    groups: tuple[tuple[int, int, int], ...] = ((1, 1, 1), (8, 8, 8), (32, 32, 32), (1, 8, 32), (32, 8, 1))
    removals: bool = pyd.Field(default=True, description="Add the rows without NCD and without TEM.")

    @pyd.field_validator("reverse", mode="before")
    @classmethod
    def _reverse_patterns(cls, v: t.Any) -> t.Any:
        values = [str(p).zfill(3) if isinstance(p, int) else p for p in v]
        for p in values:
            if not isinstance(p, str) or not _REVERSE.match(p):
                raise ValueError(f"reverse pattern must be three 0/1 digits, got {p!r}")
        return tuple(values)

    @pyd.field_validator("groups", mode="before")
    @classmethod
    def _group_triples(cls, v: t.Any) -> t.Any:
        return tuple(tuple(int(g) for g in item.strip("{}").split(";")) if isinstance(item, str) else item for item in v)

    @classmethod
    def from_file(cls, path: str | os.PathLike[str]) -> AblationGrid:
        return load_spec(cls, path)


class AblationVariant(t.NamedTuple):
    name: str
    sinet: SinetConfig


class AblationResult(t.NamedTuple):
    table: BenchmarkTable
    reports: list[MetricReport]
    files: list[pathlib.Path]


def reverse_flags(pattern: str) -> tuple[int, int, int]:
    return int(pattern[0]), int(pattern[1]), int(pattern[2])


def groups_text(groups: tuple[int, int, int]) -> str:
    return "{" + ";".join(str(g) for g in groups) + "}"
