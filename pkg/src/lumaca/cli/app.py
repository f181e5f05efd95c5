"""
The ``lumaca`` command line.

Exit status: 0 when every configured check passes, 1 when a check fails or
a computation aborts, 2 on a configuration error.
"""

from __future__ import annotations

import argparse
import contextlib
import logging
import sys
from typing import TYPE_CHECKING

from rich.console import Console
from rich.logging import RichHandler
from rich.markup import escape
from rich.table import Table

from lumaca.cli.commands import RUNNERS
from lumaca.cli.settings import COMMANDS, load_settings
from lumaca.exceptions import CheckFailedError, ConfigurationError, LumacaError
from lumaca.shared.io import ArtifactWriter
from lumaca.utils.config import Config

if TYPE_CHECKING:
    from collections.abc import Sequence

    from lumaca.cli.commands import CommandResult
    from lumaca.cli.settings import RunSettings

logger = logging.getLogger(__name__)

__all__ = ["EXIT_CONFIG", "EXIT_FAILED", "EXIT_OK", "build_parser", "execute", "main"]

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        msg = f"expected an integer >= 1, got {text}"
        raise argparse.ArgumentTypeError(msg)
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="run configuration (INI)")
    common.add_argument(
        "--override",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override a configuration entry, e.g. clock.beta=0.3 (repeatable)",
    )
    common.add_argument(
        "--threads",
        type=_positive_int,
        default=None,
        help="worker threads for ensembles (default: THREADS or 1)",
    )
    common.add_argument("--verbose", action="store_true", help="debug logging")

    parser = argparse.ArgumentParser(
        prog="lumaca",
        description="Simulate and verify SDEs driven by time-changed Brownian motion.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=f"run the {name} command")
    sub.add_parser("run", parents=[common], help="run the command named in the config")
    return parser


def _configure_logging(verbose: bool, console: Console) -> None:  # noqa: FBT001
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=console, show_path=False)],
        force=True,
    )


def _summary(result: CommandResult) -> Table:
    table = Table(title=f"lumaca {result.command}")
    table.add_column("check")
    table.add_column("value", justify="right")
    table.add_column("threshold", justify="right")
    table.add_column("status")
    for row in result.rows:
        threshold = "" if row.threshold is None else f"{row.threshold:.4g}"
        status = "[green]pass[/green]" if row.passed else "[red]FAIL[/red]"
        table.add_row(row.name, f"{row.value:.4g}", threshold, status)
    return table


def _report(console: Console, label: str, err: Exception) -> None:
    console.print(f"[bold red]{label}[/bold red]: {escape(str(err))}", highlight=False)


def execute(settings: RunSettings, threads: int | None = None) -> CommandResult:
    """
    Run a validated configuration and write its artifacts.

    ``report.json`` and every artifact of the command are listed in
    ``manifest.json`` below ``settings.output_dir``.
    """
    threads = threads if threads is not None else settings.run["threads"]
    scope = Config(threads=threads) if threads is not None else contextlib.nullcontext()
    writer = ArtifactWriter(settings.output_dir, settings.command, settings.digest)
    with scope:
        logger.info("running %s with seed %d", settings.command, settings.seed)
        result = RUNNERS[settings.command](settings, writer)
    writer.write_json("report.json", result.to_dict())
    writer.write_manifest()
    return result


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    console = Console(stderr=True)
    _configure_logging(args.verbose, console)
    command = None if args.command == "run" else args.command

    try:
        settings = load_settings(args.config, args.override, command)
        result = execute(settings, args.threads)
    except ConfigurationError as err:
        _report(console, "configuration error", err)
        return EXIT_CONFIG
    except LumacaError as err:
        _report(console, type(err).__name__, err)
        return EXIT_FAILED

    if result.rows:
        console.print(_summary(result))
    if not result.passed:
        failure = CheckFailedError(
            f"{len(result.failed)} of {len(result.rows)} checks failed",
            check=", ".join(result.failed),
        )
        _report(console, "check failed", failure)
        return EXIT_FAILED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
