from __future__ import annotations

import typing as t

from codbench.exceptions import DataIOError


class WeightFileError(DataIOError):
    """Raised when a weight file is corrupt or does not fit the network
    layout it declares."""

    default_message = "Invalid weight file"
    code: t.ClassVar[int] = 0x60


class WeightVersionError(WeightFileError):
    """Raised when a weight file carries an unsupported format version."""

    __slots__ = ("version",)

    default_message = "Unsupported weight file version"
    code: t.ClassVar[int] = 0x61

    def __init__(self, *, path: str, version: int, supported: int) -> None:
        self.version = version
        super().__init__(
            f"{self.default_message}: {path}: version {version}, expected {supported}",
            path=path,
            reason=f"version {version} (supported: {supported})",
        )
