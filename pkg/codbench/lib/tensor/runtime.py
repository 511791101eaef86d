from __future__ import annotations

import contextlib
import typing as t

import numpy as np
import numpy.typing as npt

Precision = t.Literal["float64", "float32"]

_DTYPES: dict[str, npt.DTypeLike] = {"float64": np.float64, "float32": np.float32}

_state = {"precision": "float64", "debug": False}  # type: dict[str, t.Any]


def configure(*, precision: Precision | None = None, debug: bool | None = None) -> None:
    """Set the process-wide tensor precision and debug checking."""
    if precision is not None:
        if precision not in _DTYPES:
            raise ValueError(f"Unsupported precision: {precision}")
        _state["precision"] = precision
    if debug is not None:
        _state["debug"] = bool(debug)


def dtype() -> np.dtype[t.Any]:
    return np.dtype(_DTYPES[_state["precision"]])


def debug_enabled() -> bool:
    return bool(_state["debug"])


@contextlib.contextmanager
def precision(name: Precision, /) -> t.Generator[None, None, None]:
    """Temporarily switch tensor precision."""
    previous = _state["precision"]
    configure(precision=name)
    try:
        yield
    finally:
        _state["precision"] = previous


@contextlib.contextmanager
def debug_checks(enabled: bool = True, /) -> t.Generator[None, None, None]:
    """Temporarily enable non-finite checks after every op."""
    previous = _state["debug"]
    configure(debug=enabled)
    try:
        yield
    finally:
        _state["debug"] = previous
