from __future__ import annotations

import pathlib
import tempfile
import typing as t

from pydantic import Field

from codbench.cli.args import BaseArgs
from codbench.cli.helper import display

if t.TYPE_CHECKING:
    from codbench.config import Config

DEFAULT_OUTPUT = {"dotenv": pathlib.Path("codbench.cfg"), "yaml": pathlib.Path("codbench.yml")}


class Args(BaseArgs):
    """Write the default configuration with every key documented.

    The key=value form uses dotted keys (model.sinet.channels=32) and is
    read back with --config.
    """

    format: t.Literal["dotenv", "yaml"] = Field(
        default="dotenv",
        alias="f",
        description="key=value file or YAML.",
    )

    output: pathlib.Path | None = Field(
        default=None,
        alias="o",
        description="Output file; use - for stdout.",
    )

    def run(self) -> None:
        from codbench.config import Config
        from codbench.exceptions import DataIOError

        cfg = Config()
        if self.output == pathlib.Path("-"):
            with tempfile.TemporaryDirectory() as tmp:
                path = pathlib.Path(tmp) / "config"
                self._write(cfg, path)
                print(path.read_text(encoding="utf-8"), end="")
            return

        out = self.output or DEFAULT_OUTPUT[self.format]
        try:
            out.parent.mkdir(parents=True, exist_ok=True)
            self._write(cfg, out)
        except OSError as e:
            raise DataIOError(path=str(out), reason=str(e)) from e
        display.success(f"{self.format} configuration generated")
        display.saved(out, label="Saved to")

    def _write(self, cfg: Config, path: pathlib.Path) -> None:
        if self.format == "yaml":
            cfg.to_yaml(path)
        else:
            cfg.to_env_file(path)
