from __future__ import annotations

import abc
import argparse
import json
import pathlib
import types
import typing as t

import typing_extensions as te

from pydantic import BaseModel
from pydantic import ConfigDict
from pydantic import Field
from pydantic import ModelWrapValidatorHandler
from pydantic import ValidationError
from pydantic import model_validator
from pydantic.fields import FieldInfo

from codbench import __description__
from codbench import __prog__
from codbench import __version__
from codbench.cli.exceptions import InvalidArgumentError
from codbench.helper.settings import parse_env_literal

if t.TYPE_CHECKING:
    from codbench.config import Config

EXIT_CODES = """\
exit codes:
  0    success
  1    unexpected error
  2    configuration or argument error
  3    I/O error: unreadable input, corrupt weight file, missing predictions
  4    validation error: shapes, invalid grid entries, malformed reports
  130  interrupted

environment:
  CODBENCH__CORE__RUNTIME__THREADS  default worker thread count
  CODBENCH__<SECTION>__<KEY>        any configuration key, e.g. CODBENCH__CORE__RUNTIME__SEED
"""


class BaseArgs(BaseModel, abc.ABC):
    """Base class for CLI arguments with automatic argparse integration.

    Argparse options are generated from the pydantic fields:
    - bool: store_true, or `--no-<name>` when the default is True
    - list[T] / tuple[T, ...]: nargs
    - Optional[T]: optional with default None
    - Literal[...]: choices
    - pathlib.Path: type=pathlib.Path

    Example:
        ```python
        class EchoArgs(BaseArgs):
            text: str = Field(description="What to print")

            def run(self) -> None:
                print(self.text)


        parser = argparse.ArgumentParser()
        EchoArgs.build_args(parser)
        parser.set_defaults(func=EchoArgs.func)
        args = parser.parse_args(["--text", "hi"])
        args.func(args)
        ```
    """

    @abc.abstractmethod
    def run(self) -> None:
        """Execute the command logic."""

    @classmethod
    def func(cls, args: argparse.Namespace) -> None:
        """Entry point called by argparse.  Parses args and calls run()."""
        cls.parse_args(args).run()

    @classmethod
    def build_args(cls, parser: argparse.ArgumentParser) -> None:
        """Add one option per public field; `alias` becomes the short flag."""
        for name, info in cls.__pydantic_fields__.items():
            if name.startswith("_"):
                continue
            flags, options = _option(name, info)
            parser.add_argument(*flags, dest=name, **options)

    @classmethod
    def parse_args(cls, args: argparse.Namespace) -> te.Self:
        """Parse an argparse Namespace into a validated instance."""
        field_names = set(cls.__pydantic_fields__.keys())
        filtered = {k: v for k, v in vars(args).items() if k in field_names}
        return cls.model_validate(filtered, by_alias=False, by_name=True, strict=False)

    @classmethod
    def register_subparser(
        cls,
        subparsers: argparse._SubParsersAction[argparse.ArgumentParser],
        name: str,
        help_text: str | None = None,
    ) -> argparse.ArgumentParser:
        """Register this command as a subcommand; help defaults to the
        class docstring."""
        if help_text is None:
            help_text = cls.__doc__.strip().splitlines()[0] if cls.__doc__ else f"{name} command"

        parser = subparsers.add_parser(
            name,
            help=help_text,
            description=cls.__doc__.strip() if cls.__doc__ else help_text,
            epilog=EXIT_CODES,
            formatter_class=argparse.RawDescriptionHelpFormatter,
        )
        cls.build_args(parser)
        parser.set_defaults(func=cls.func)
        return parser

    @model_validator(mode="wrap")
    @classmethod
    def reraise(cls, data: t.Any, handler: ModelWrapValidatorHandler[te.Self]) -> te.Self:
        """Turn pydantic failures into InvalidArgumentError (exit 2)."""
        try:
            return handler(data)
        except ValidationError as e:
            raise InvalidArgumentError.from_validation_error(e) from e

    model_config = ConfigDict(
        extra="ignore",
        frozen=True,
        arbitrary_types_allowed=True,
        populate_by_name=True,
    )


class RunArgs(BaseArgs, abc.ABC):
    """Options shared by every command that does work: a configuration
    file, `key=value` overrides and the runtime knobs. Flags win over the
    file."""

    config: pathlib.Path | None = Field(
        default=None,
        alias="c",
        description="Configuration file (YAML, or flat key=value with dotted keys).",
    )

    define: list[str] = Field(
        default_factory=list,
        alias="D",
        description="Configuration overrides as dotted key=value pairs, e.g. model.sinet.channels=16; lists as JSON.",
    )

    threads: int | None = Field(
        default=None,
        ge=1,
        alias="j",
        description="Worker threads for image-level work; results do not depend on it.",
    )

    seed: int | None = Field(
        default=None,
        ge=0,
        description="Seed replacing the initialization, shuffling and toy dataset seeds.",
    )

    def overrides(self) -> dict[str, t.Any]:
        """Dotted-key overrides from flags; subclasses add their own."""
        out: dict[str, t.Any] = {}
        for item in self.define:
            key, sep, value = item.partition("=")
            if not sep or not key.strip():
                raise InvalidArgumentError(arg="define", value=item, reason="expected key=value")
            value = value.strip()
            try:
                out[key.strip()] = parse_env_literal(value)
            except json.JSONDecodeError as e:
                raise InvalidArgumentError(arg="define", value=item, reason=f"invalid JSON: {e}") from e
        if self.threads is not None:
            out["core.runtime.threads"] = self.threads
        if self.seed is not None:
            out["core.runtime.seed"] = self.seed
        return out

    def load_config(self) -> Config:
        """Build, install and initialize the effective configuration.

        Raises:
            ConfigurationError: On an unreadable file or unknown keys.
        """
        from codbench.config import Config
        from codbench.config import setconfig

        cfg = Config.from_file(self.config) if self.config else Config()
        overrides = self.overrides()
        if overrides:
            cfg = cfg.merged(overrides)
        setconfig(cfg)
        cfg.init()
        return cfg


def parser_with_version(
    prog: str = __prog__,
    description: str = __description__,
) -> argparse.ArgumentParser:
    """Create an argument parser with --version, --help and the exit
    code table."""
    parser = argparse.ArgumentParser(
        prog=prog,
        description=description,
        epilog=EXIT_CODES,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument(
        "--version",
        "-V",
        action="version",
        version=f"%(prog)s {__version__}",
        help="Show the version number and exit.",
    )
    return parser


def _unwrap_optional(ann: t.Any) -> tuple[t.Any, bool]:
    if t.get_origin(ann) in (t.Union, types.UnionType):
        inner = [a for a in t.get_args(ann) if a is not type(None)]
        if len(inner) == 1 and len(inner) < len(t.get_args(ann)):
            return inner[0], True
    return ann, False


def _choices(ann: t.Any) -> tuple[t.Any, list[t.Any] | None]:
    if t.get_origin(ann) is t.Literal:
        values = list(t.get_args(ann))
        return type(values[0]), values
    return ann, None


def _option(name: str, info: FieldInfo) -> tuple[tuple[str, ...], dict[str, t.Any]]:
    """argparse flags and keyword arguments for one pydantic field.

    Booleans are switches (`--no-<name>` when they default to true),
    lists and tuples take several values, `Literal` fields list their
    choices and paths show a PATH metavar.
    """
    long = f"--{name.replace('_', '-')}"
    flags = (long, f"-{info.alias}") if info.alias else (long,)
    required = info.is_required()
    default = None if required else info.get_default(call_default_factory=True)
    ann, optional = _unwrap_optional(info.annotation)
    required = required and not optional
    help_text = info.description or ""

    if ann is bool:
        if default is True:
            return (f"--no-{name.replace('_', '-')}",), {"action": "store_false", "default": True, "help": help_text}
        return flags, {"action": "store_true", "default": False, "help": help_text}

    options: dict[str, t.Any] = {"required": required, "default": default, "help": help_text}
    if t.get_origin(ann) in (list, tuple):
        item, choices = _choices((t.get_args(ann) or (str,))[0])
        options.update(type=item, nargs="+" if required else "*", choices=choices)
    else:
        ann, choices = _choices(ann)
        options.update(type=ann if callable(ann) else str, choices=choices)
    if options["type"] is pathlib.Path:
        options["metavar"] = "PATH"
    return flags, options
