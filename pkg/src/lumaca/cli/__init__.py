from __future__ import annotations

from lumaca.cli.app import execute, main
from lumaca.cli.commands import CheckRow, CommandResult
from lumaca.cli.settings import RunSettings, load_settings, parse_settings

__all__ = [
    "CheckRow",
    "CommandResult",
    "RunSettings",
    "execute",
    "load_settings",
    "main",
    "parse_settings",
]
