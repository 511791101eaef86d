from __future__ import annotations

import decimal
import os
import pathlib
import typing as t


def flatten_dict(m: t.Mapping[str, t.Any], /, sep: str = ".") -> dict[str, t.Any]:
    """`{"a": {"b": 1}}` -> `{"a.b": 1}`; lists stay leaves."""
    out: dict[str, t.Any] = {}
    for key, value in m.items():
        if isinstance(value, t.Mapping) and value:
            out.update({f"{key}{sep}{k}": v for k, v in flatten_dict(value, sep).items()})
        else:
            out[key] = value
    return out


def unflatten_dict(m: t.Mapping[str, t.Any], /, sep: str = ".") -> dict[str, t.Any]:
    """Inverse of `flatten_dict`."""
    out: dict[str, t.Any] = {}
    for key, value in m.items():
        node = out
        *parents, leaf = key.split(sep)
        for part in parents:
            node = node.setdefault(part, {})
        node[leaf] = value
    return out


def round_half_up(value: float, /, digits: int = 3) -> decimal.Decimal:
    """Round a float the way the benchmark tables print numbers.

    Python's `round` is banker's rounding; the tables use half-up on the
    shortest decimal representation of the value.

    Args:
        value: The value to round.
        digits: Number of decimals.

    Returns:
        The rounded value as a Decimal.
    """
    quant = decimal.Decimal(1).scaleb(-digits)
    return decimal.Decimal(repr(float(value))).quantize(quant, rounding=decimal.ROUND_HALF_UP)


def fmt_score(value: float | None, /, digits: int = 3) -> str:
    """Render a score with fixed decimals, or `N/A` when undefined."""
    if value is None:
        return "N/A"
    return f"{round_half_up(value, digits):.{digits}f}"


def fmt_percent(value: float | None, /, digits: int = 1) -> str:
    """Render a ratio as a percentage, or `N/A` when undefined."""
    if value is None:
        return "N/A"
    return f"{round_half_up(value * 100.0, digits):.{digits}f}%"


def file_stem(path: str | os.PathLike[str], /) -> str:
    """Extension-insensitive matching key of a file."""
    return pathlib.Path(path).stem


def default_threads() -> int:
    """Number of worker threads used when nothing is configured."""
    return max(1, os.cpu_count() or 1)
