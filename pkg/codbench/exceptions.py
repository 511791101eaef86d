from __future__ import annotations

import typing as t

import typing_extensions as te

import pydantic as pyd


class CodbenchError(Exception):
    """Base exception for all Codbench-related errors.

    Attributes:
        default_message: Default error message for this exception type.
        code: Unique error code identifying this exception type.
        exit_code: Process exit code used by the CLI for this error family.
        message: The actual error message for this instance.
    """

    __slots__ = ("message",)

    default_message: t.ClassVar[str] = "An error occurred in Codbench."
    code: t.ClassVar[int] = 0x01
    exit_code: t.ClassVar[int] = 1

    def __init__(self, message: str | None = None) -> None:
        """Initialize the exception.

        Args:
            message: Custom error message. If None, uses default_message.
        """
        self.message = message or self.default_message
        super().__init__(self.message)

    def __str__(self) -> str:
        """Return formatted error string with code."""
        return f"[Error {self.code}] {self.message}"

    def __repr__(self) -> str:
        """Return detailed representation of the exception."""
        return f"{self.__class__.__name__}(code={self.code}, message={self.message!r})"

    def as_dict(self) -> dict[str, t.Any]:
        """Convert exception to dictionary with all slots."""
        data: dict[str, t.Any] = {"code": self.code, "exit_code": self.exit_code}
        for cls in type(self).__mro__:
            for slot in getattr(cls, "__slots__", ()):
                data[slot] = getattr(self, slot, None)
        return data


class ConfigurationError(CodbenchError):
    """Exception raised for configuration errors."""

    __slots__ = ("config_key", "reason")

    default_message = "Configuration error occurred"
    code: t.ClassVar[int] = 0x13
    exit_code: t.ClassVar[int] = 2

    def __init__(self, message: str | None = None, *, config_key: str, reason: str) -> None:
        """Initialize the exception.

        Args:
            message: Custom error message. If None, uses formatted
                default_message.
            config_key: The configuration key that caused the error.
            reason: Description of the configuration error.
        """
        self.config_key = config_key
        self.reason = reason
        super().__init__(message or f"{self.default_message}: [{config_key}] {reason}")


class ValidationError(CodbenchError):
    """Exception raised when inputs fail validation."""

    __slots__ = ("reason",)

    default_message = "Validation failed"
    code: t.ClassVar[int] = 0x12
    exit_code: t.ClassVar[int] = 4

    def __init__(self, message: str | None = None, *, reason: str) -> None:
        """Initialize the exception.

        Args:
            reason: Description of what failed validation.
            message: Custom error message. If None, uses formatted default_message.
        """
        self.reason = reason
        super().__init__(message or f"{self.default_message}: {reason}")

    @classmethod
    def from_pydantic_validation_err(cls, err: pyd.ValidationError) -> te.Self:
        """Create ValidationError from a Pydantic ValidationError."""
        reason = "; ".join(f"{e['loc']}: {e['msg']}" for e in err.errors())
        return cls(reason=reason)


class DataIOError(CodbenchError):
    """Exception raised when a file cannot be read or written."""

    __slots__ = ("path", "reason")

    default_message = "I/O error"
    code: t.ClassVar[int] = 0x40
    exit_code: t.ClassVar[int] = 3

    def __init__(self, message: str | None = None, *, path: str, reason: str) -> None:
        self.path = path
        self.reason = reason
        super().__init__(message or f"{self.default_message}: {path}: {reason}")


class MissingPredictionError(DataIOError):
    """Exception raised when ground-truth masks have no matching
    prediction file."""

    __slots__ = ("missing",)

    default_message = "Missing predictions"
    code: t.ClassVar[int] = 0x41

    def __init__(self, missing: t.Sequence[str], *, pred_dir: str) -> None:
        """Initialize the exception.

        Args:
            missing: Every ground-truth stem without a prediction.
            pred_dir: The prediction directory that was searched.
        """
        self.missing = list(missing)
        shown = ", ".join(self.missing[:20])
        more = f" (+{len(self.missing) - 20} more)" if len(self.missing) > 20 else ""
        super().__init__(
            f"{self.default_message} in {pred_dir}: {len(self.missing)} file(s): {shown}{more}",
            path=pred_dir,
            reason=f"{len(self.missing)} missing",
        )
