from __future__ import annotations

import typing as t

import typing_extensions as te

import pydantic as pyd

from codbench.exceptions import CodbenchError


class InvalidArgumentError(CodbenchError):
    """A command-line value that argparse accepted but the command cannot use."""

    __slots__ = ("arg", "value", "reason")

    default_message = "Invalid argument"
    code: t.ClassVar[int] = 0x31
    exit_code: t.ClassVar[int] = 2

    def __init__(self, message: str | None = None, *, arg: str, value: t.Any, reason: str) -> None:
        self.arg = arg
        self.value = value
        self.reason = reason
        super().__init__(message or f"{self.default_message} --{arg.replace('_', '-')}={value!r}: {reason}")

    @classmethod
    def from_validation_error(cls, error: pyd.ValidationError) -> te.Self:
        """Name the first offending option; list every failure in the reason."""
        problems = error.errors()
        first = problems[0]
        arg = str(first["loc"][0]) if first["loc"] else "arguments"
        reason = "; ".join(f"{'.'.join(map(str, p['loc'])) or arg}: {p['msg']}" for p in problems)
        return cls(arg=arg, value=first.get("input"), reason=reason)
