from __future__ import annotations

import contextlib
import os
import pathlib
import sys
import traceback
import typing as t

import halo

from codbench.cli.helper.ansi import Style
from codbench.cli.helper.ansi import paint
from codbench.exceptions import CodbenchError
from codbench.utils import fmt_score

if t.TYPE_CHECKING:
    from codbench.lib.metrics import MetricSummary

_MARKS: dict[str, tuple[str, tuple[Style, ...]]] = {
    "success": ("✓", (Style.GREEN, Style.BOLD)),
    "warning": ("⚠", (Style.YELLOW, Style.BOLD)),
    "info": ("ℹ", (Style.CYAN,)),
    "error": ("✗", (Style.RED, Style.BOLD)),
}


def _status(kind: str, message: str, *, file: t.TextIO | None = None) -> None:
    mark, styles = _MARKS[kind]
    print(f"{paint(mark, *styles)} {message}", file=file or sys.stdout)


def success(message: str, /) -> None:
    _status("success", message)


def warning(message: str, /) -> None:
    _status("warning", message)


def info(message: str, /) -> None:
    _status("info", message)


def saved(target: str | os.PathLike[str], /, label: str = "Wrote") -> None:
    """Print an output path with a mark telling whether it now exists."""
    target = pathlib.Path(target)
    mark = _MARKS["success" if target.exists() else "error"]
    print(f"{paint(label + ':', Style.BOLD)} {paint(mark[0], *mark[1])} {paint(str(target), Style.CYAN)}")


def paths(files: t.Iterable[str | os.PathLike[str]], /, label: str = "Wrote") -> None:
    for f in files:
        saved(f, label=label)


def key_value(data: t.Mapping[str, t.Any], /, indent: int = 0) -> None:
    if not data:
        return
    width = max(len(str(k)) for k in data)
    pad = "  " * indent
    for key, value in data.items():
        print(f"{pad}{paint(str(key).ljust(width), Style.BOLD)}  {value}")


def scores(summary: MetricSummary, /) -> None:
    """Print the four benchmark scores of a summary, three decimals each."""
    key_value(
        {
            "Images": summary.count,
            "S_α": fmt_score(summary.s_alpha),
            "E_φ": fmt_score(summary.e_phi),
            "F_β^w": fmt_score(summary.f_beta_w),
            "M": fmt_score(summary.mae),
        },
        indent=1,
    )


@contextlib.contextmanager
def loading(text: str, /) -> t.Iterator[halo.Halo]:
    """Spinner on stderr for a long step; silent when stderr is not a tty."""
    spinner = halo.Halo(text=text, spinner="dots", stream=sys.stderr, enabled=sys.stderr.isatty())
    spinner.start()
    try:
        yield spinner
    except BaseException as e:
        spinner.fail(f"{text} failed: {e}")
        raise
    else:
        spinner.succeed(text)
    finally:
        spinner.stop()


@contextlib.contextmanager
def section(title: str, /) -> t.Iterator[None]:
    print()
    print(paint(f"┌─ {title}", Style.CYAN, Style.BOLD))
    try:
        yield
    finally:
        print(paint("└" + "─" * (len(title) + 3), Style.CYAN))


def banner(text: str, /, subtitle: str | None = None) -> None:
    inner = max(len(text), len(subtitle or ""))
    rule = "─" * (inner + 2)
    print()
    print(paint(f"┌{rule}┐", Style.CYAN, Style.BOLD))
    print(paint(f"│ {text.center(inner)} │", Style.CYAN, Style.BOLD))
    if subtitle:
        print(paint(f"│ {subtitle.center(inner)} │", Style.CYAN))
    print(paint(f"└{rule}┘", Style.CYAN, Style.BOLD))


def show_error(exc: BaseException, verbose: bool = False) -> None:
    """Report a failed command on stderr, with its exit code and,
    when verbose, the traceback."""
    _status("error", f"{type(exc).__name__}: {exc}", file=sys.stderr)
    if isinstance(exc, CodbenchError):
        print(paint(f"  exit code {exc.exit_code}", Style.DIM), file=sys.stderr)
    if verbose:
        print(paint("\nTraceback:", Style.DIM), file=sys.stderr)
        traceback.print_exception(type(exc), exc, exc.__traceback__)
