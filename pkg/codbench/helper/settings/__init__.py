from __future__ import annotations

import json
import os
import pathlib
import typing as t

import typing_extensions as te

import dotenv
import yaml
from pydantic import BaseModel as PydBaseModel
from pydantic import ConfigDict
from pydantic import ValidationError as PydValidationError
from pydantic_settings import BaseSettings

from codbench import utils
from codbench.exceptions import ConfigurationError

PathLike: t.TypeAlias = str | os.PathLike[str]

ENV_HEADER = "# Codbench configuration. Keys are dotted paths; CLI flags override them.\n"
YAML_HEADER = "# Codbench configuration. CLI flags override these values.\n"


class BaseModel(PydBaseModel):
    """Configuration section: validated on assignment, unknown keys
    rejected, hashable by content so equal network variants collapse."""

    model_config: t.ClassVar[ConfigDict] = ConfigDict(
        validate_assignment=True,
        extra="forbid",
        arbitrary_types_allowed=True,
        use_enum_values=True,
        populate_by_name=True,
    )

    def __hash__(self) -> int:
        return hash(json.dumps(self.model_dump(mode="json"), sort_keys=True))


def field_descriptions(model: type[PydBaseModel], prefix: str = "") -> dict[str, str]:
    """Dotted field path -> `Field(description=...)`, nested sections included."""
    out: dict[str, str] = {}
    for name, info in model.model_fields.items():
        key = f"{prefix}.{name}" if prefix else name
        if info.description:
            out[key] = info.description
        nested = info.annotation
        if isinstance(nested, type) and issubclass(nested, PydBaseModel):
            out.update(field_descriptions(nested, key))
    return out


def env_literal(value: t.Any) -> str:
    """One value of a key=value file; containers are JSON."""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, (list, tuple, dict)):
        return json.dumps(value)
    return str(value)


def parse_env_literal(raw: str) -> t.Any:
    return json.loads(raw) if raw[:1] in {"[", "{"} else raw


class Settings(BaseSettings):
    """Settings root that loads from YAML, flat key=value files and
    dotted overrides, and writes both file forms back with descriptions."""

    @classmethod
    def from_mapping(cls, data: t.Mapping[str, t.Any]) -> te.Self:
        """Validate a nested mapping.

        Raises:
            ConfigurationError: Naming the first offending dotted key.
        """
        try:
            return cls(**dict(data))
        except PydValidationError as e:
            first = e.errors()[0]
            key = ".".join(map(str, first["loc"])) or "<root>"
            raise ConfigurationError(config_key=key, reason=first["msg"]) from e

    @classmethod
    def from_yaml(cls, path: PathLike) -> te.Self:
        return cls.from_mapping(yaml.safe_load(pathlib.Path(path).read_text(encoding="utf-8")) or {})

    @classmethod
    def from_env_file(cls, path: PathLike) -> te.Self:
        """Load `model.sinet.channels=32` style lines; `#` starts a comment
        and keys without a value are skipped."""
        flat = {k: parse_env_literal(v) for k, v in dotenv.dotenv_values(path).items() if v is not None}
        return cls.from_mapping(utils.unflatten_dict(flat))

    def merged(self, overrides: t.Mapping[str, t.Any]) -> te.Self:
        """Copy with dotted-key overrides applied, then validated again.
        A key may name a leaf or a whole section."""
        current = utils.flatten_dict(self.model_dump(mode="json"))
        for key in overrides:
            if key not in current and not any(k.startswith(key + ".") for k in current):
                raise ConfigurationError(config_key=key, reason="unknown configuration key")
        return self.from_mapping(utils.unflatten_dict({**current, **overrides}))

    def to_yaml(self, fpath: PathLike) -> None:
        body = yaml.safe_dump(self.model_dump(mode="json"), sort_keys=False, allow_unicode=True)
        pathlib.Path(fpath).write_text(YAML_HEADER + body, encoding="utf-8")

    def to_env_file(self, fpath: PathLike) -> None:
        """Write every leaf as `key=value` under its description. Unset
        optional values are written commented out."""
        pathlib.Path(fpath).write_text("".join(self._env_lines()), encoding="utf-8")

    def _env_lines(self) -> t.Iterator[str]:
        docs = field_descriptions(type(self))
        rule = "# " + "=" * 70 + "\n"
        yield ENV_HEADER
        section = None
        for key, value in utils.flatten_dict(self.model_dump(mode="json")).items():
            top = key.partition(".")[0]
            if top != section:
                section = top
                yield f"\n{rule}# {top.upper()}: {docs.get(top, '')}\n{rule}"
            if key in docs:
                yield f"\n# {docs[key]}\n"
            yield f"# {key}=\n" if value is None else f"{key}={env_literal(value)}\n"
