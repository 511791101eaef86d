from __future__ import annotations

import abc
import typing as t

import typing_extensions as te

import pydantic as pyd

from codbench.exceptions import ValidationError


class BaseValueObject(pyd.BaseModel, abc.ABC):
    """Immutable record validated on construction.

    Pydantic failures are re-raised as `ValidationError` so callers only
    ever see the package's own error hierarchy.
    """

    model_config: t.ClassVar[pyd.ConfigDict] = pyd.ConfigDict(
        frozen=True,
        extra="forbid",
    )

    @pyd.model_validator(mode="wrap")
    @classmethod
    def reraise(cls, data: t.Any, handler: pyd.ModelWrapValidatorHandler[te.Self]) -> te.Self:
        try:
            return handler(data)
        except pyd.ValidationError as e:
            raise ValidationError.from_pydantic_validation_err(e) from e

    def __repr__(self) -> str:
        field_reprs = ", ".join(f"{field_name}={getattr(self, field_name)!r}" for field_name in type(self).model_fields)
        return f"VALUEOBJECT <{self.__class__.__name__}({field_reprs})>"
