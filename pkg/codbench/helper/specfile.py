from __future__ import annotations

import os
import pathlib
import typing as t

import pydantic as pyd
import yaml

from codbench.exceptions import DataIOError
from codbench.exceptions import ValidationError

M = t.TypeVar("M", bound=pyd.BaseModel)


def read_spec(path: str | os.PathLike[str]) -> t.Any:
    """Parse a YAML or JSON run description (JSON is valid YAML)."""
    path = pathlib.Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise DataIOError(path=str(path), reason=str(e)) from e
    try:
        return yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise ValidationError(reason=f"{path}: not valid YAML or JSON: {e}") from e


def load_spec(model: type[M], path: str | os.PathLike[str]) -> M:
    """Read and validate a run description against `model`.

    Raises:
        DataIOError: When the file cannot be read.
        ValidationError: On malformed content or unknown keys.
    """
    data = read_spec(path)
    if not isinstance(data, dict):
        raise ValidationError(reason=f"{path}: expected a mapping at the top level")
    try:
        return model.model_validate(data)
    except pyd.ValidationError as e:
        raise ValidationError(reason=f"{path}: {ValidationError.from_pydantic_validation_err(e).reason}") from e
    except ValidationError as e:
        raise ValidationError(reason=f"{path}: {e.reason}") from e
