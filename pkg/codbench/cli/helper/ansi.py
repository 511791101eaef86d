from __future__ import annotations

import enum
import os
import sys


class Style(str, enum.Enum):
    """SGR codes used by the status lines and tables of the CLI."""

    RESET = "\033[0m"
    BOLD = "\033[1m"
    DIM = "\033[2m"
    CYAN = "\033[36m"
    GRAY = "\033[90m"
    RED = "\033[91m"
    GREEN = "\033[92m"
    YELLOW = "\033[93m"


def color_enabled(stream: object = sys.stdout) -> bool:
    """`NO_COLOR` wins over `FORCE_COLOR`; otherwise color only on a tty."""
    if os.environ.get("NO_COLOR"):
        return False
    if os.environ.get("FORCE_COLOR"):
        return True
    isatty = getattr(stream, "isatty", None)
    return bool(isatty and isatty())


def paint(text: str, /, *styles: Style) -> str:
    if not styles or not color_enabled():
        return text
    codes = "".join(s.value for s in styles)
    # nested paint() calls reset; restore the outer styles after each one
    return codes + text.replace(Style.RESET.value, Style.RESET.value + codes) + Style.RESET.value
