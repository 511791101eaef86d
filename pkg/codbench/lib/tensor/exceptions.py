from __future__ import annotations

import typing as t

from codbench.exceptions import ValidationError


class ShapeError(ValidationError):
    """Raised when an op receives operands of incompatible shape."""

    __slots__ = ("dimension", "expected", "got", "op")

    default_message = "Shape mismatch"
    code: t.ClassVar[int] = 0x50

    def __init__(self, op: str, *, dimension: str, expected: t.Any, got: t.Any) -> None:
        """Initialize the exception.

        Args:
            op: Name of the failing op.
            dimension: The offending dimension (e.g. "channels", "height").
            expected: What the op required.
            got: What it received.
        """
        self.op = op
        self.dimension = dimension
        self.expected = expected
        self.got = got
        reason = f"{op}: {dimension} expected {expected}, got {got}"
        super().__init__(f"{self.default_message}: {reason}", reason=reason)


class NonFiniteError(ValidationError):
    """Raised when a tensor holds NaN or Inf values."""

    __slots__ = ("op",)

    default_message = "Non-finite values"
    code: t.ClassVar[int] = 0x51

    def __init__(self, op: str) -> None:
        self.op = op
        super().__init__(reason=f"{op} produced NaN or Inf")


class TapeError(ValidationError):
    """Raised on invalid use of the differentiation tape."""

    default_message = "Tape error"
    code: t.ClassVar[int] = 0x52
