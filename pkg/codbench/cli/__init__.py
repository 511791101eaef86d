from __future__ import annotations

import argparse
import sys

import dotenv

from codbench.cli.apis import register_apis
from codbench.cli.args import parser_with_version
from codbench.cli.helper import display
from codbench.exceptions import CodbenchError

INTERRUPTED = 130


def build_parser() -> argparse.ArgumentParser:
    parser = parser_with_version()
    parser.add_argument("--verbose", "-v", action="store_true", help="Print the traceback of a failure.")
    commands = parser.add_subparsers(title="commands", dest="command", metavar="<command>", required=True)
    register_apis(commands)
    return parser


def _argparse_exit(code: str | int | None) -> int:
    # --help and --version exit with None, usage errors with 2
    if code is None:
        return 0
    return code if isinstance(code, int) else 1


def main(argv: list[str] | None = None) -> int:
    """Run one command and return its exit code.

    0 success, 1 unexpected error, 2 configuration or argument error,
    3 I/O error, 4 validation error, 130 interrupted. `.env` in the
    working directory is loaded first so its `CODBENCH__*` variables
    reach the configuration.
    """
    if path := dotenv.find_dotenv(usecwd=True):
        dotenv.load_dotenv(path)

    argv = sys.argv[1:] if argv is None else argv
    # decided before parsing so that argument errors honor it too
    verbose = bool({"-v", "--verbose"} & set(argv))
    try:
        args = build_parser().parse_args(argv)
        args.func(args)
    except SystemExit as e:
        return _argparse_exit(e.code)
    except KeyboardInterrupt:
        print()
        display.warning("Cancelled by user")
        return INTERRUPTED
    except Exception as e:
        display.show_error(e, verbose=verbose)
        return e.exit_code if isinstance(e, CodbenchError) else 1
    return 0


def cli() -> None:
    """Console script entry point.

    Example:
        ```bash
        codbench train-toy -o runs/toy
        codbench infer -w runs/toy/weights.codw -i runs/toy/data/Imgs -o runs/toy/pred
        codbench eval -p runs/toy/pred -g runs/toy/data -o runs/toy/eval
        ```
    """
    sys.exit(main())


if __name__ == "__main__":
    cli()
