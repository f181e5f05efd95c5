"""
Run configuration files.

A run is described by an INI file: a ``[run]`` section, the shared
``[clock]`` and ``[model]`` sections and one section per command. Every key
is declared in ``SCHEMA``; unknown sections and keys are errors that name
the offending line.

Example
-------
::

    [run]
    command = moments
    seed = 7
    n_paths = 20000
    output_dir = out/moments

    [clock]
    kind = inverse_stable
    beta = 0.5
    step = 0.001
    horizon = 1.0

    [moments]
    checks = mittag_leffler, ou_mean
"""

from __future__ import annotations

import configparser
import logging
from dataclasses import dataclass
from pathlib import Path
from types import MappingProxyType
from typing import TYPE_CHECKING, Any, get_args

from lumaca.closed_form.coeffs import LinearCoeffs
from lumaca.closed_form.presets import PRESETS, ModelPreset
from lumaca.exceptions import ConfigurationError
from lumaca.shared.serialize.encoder import dumps
from lumaca.shared.serialize.fingerprint import digest
from lumaca.timechange.clocks import ClockSpec
from lumaca.typing import Command

if TYPE_CHECKING:
    from collections.abc import Callable, Mapping, Sequence

logger = logging.getLogger(__name__)

__all__ = ["COMMANDS", "SCHEMA", "RunSettings", "load_settings", "parse_settings"]

COMMANDS: tuple[str, ...] = get_args(Command)

_LINEAR_KEYS = ("rho1", "rho2", "mu1", "mu2", "sigma1", "sigma2")


def _boolean(text: str) -> bool:
    states = configparser.ConfigParser.BOOLEAN_STATES
    if text.lower() not in states:
        msg = f"not a boolean: {text!r}"
        raise ValueError(msg)
    return states[text.lower()]


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(p) for p in text.replace(",", " ").split())


def _names(text: str) -> tuple[str, ...]:
    return tuple(p.strip() for p in text.split(",") if p.strip())


def _optional(parse: Callable[[str], Any]) -> Callable[[str], Any]:
    def inner(text: str) -> Any:
        return None if text.strip().lower() in ("", "none") else parse(text)

    return inner


@dataclass(frozen=True)
class Field:
    parse: Callable[[str], Any]
    default: Any


def _preset_keys() -> dict[str, Field]:
    keys = {"preset": Field(str, "black_scholes")}
    for model in PRESETS.values():
        for name in model.defaults:
            keys[name] = Field(_optional(float), None)
    for name in (*_LINEAR_KEYS, "x0"):
        keys[name] = Field(_optional(float), None)
    return keys


SCHEMA: Mapping[str, Mapping[str, Field]] = MappingProxyType({
    "run": {
        "command": Field(_optional(str), None),
        "seed": Field(int, 0),
        "n_paths": Field(int, 100),
        "output_dir": Field(Path, Path("out")),
        "threads": Field(_optional(int), None),
    },
    "clock": {
        "kind": Field(str, "identity"),
        "step": Field(float, 1e-3),
        "horizon": Field(float, 1.0),
        "beta": Field(_optional(float), None),
        "scale_low": Field(float, 1.0),
        "scale_high": Field(float, 1.0),
        "path": Field(_optional(Path), None),
    },
    "model": _preset_keys(),
    "simulate": {
        "scheme": Field(str, "euler"),
        "save_paths": Field(int, 3),
    },
    "verify": {
        "checks": Field(_names, ("first_cov", "second_cov", "qv", "tc_ito")),
        "threshold": Field(float, 0.05),
        "function": Field(str, "x2"),
        "a": Field(float, 0.0),
        "f": Field(float, 0.0),
        "g": Field(float, 1.0),
        "indicator_end": Field(float, 0.5),
        "step_at": Field(float, 1.0),
        "negative_threshold": Field(float, 0.1),
        "negative_fraction": Field(float, 0.9),
    },
    "moments": {
        "checks": Field(_names, ("mittag_leffler", "ou_mean", "variance_homogeneous")),
        "t": Field(float, 1.0),
        "lam": Field(float, 1.0),
        "rho": Field(float, 0.0),
        "mu": Field(float, 0.0),
        "sigma": Field(float, 0.3),
        "alpha": Field(float, 1.0),
        "ou_mu": Field(float, 0.5),
        "x0": Field(float, 1.0),
        "threshold": Field(float, 3.0),
        "allowance": Field(float, 0.05),
        "trend_times": Field(_floats, ()),
    },
    "converge": {
        "steps": Field(_floats, (0.1, 0.05, 0.025, 0.0125)),
        "reference": Field(str, "closed_form"),
        "min_slope": Field(_optional(float), None),
        "max_slope": Field(_optional(float), None),
        "require_monotone": Field(_boolean, False),
    },
    "fracpde": {
        "beta": Field(float, 0.5),
        "mu": Field(float, 0.0),
        "sigma": Field(float, 1.0),
        "x_init": Field(float, 0.0),
        "t_final": Field(float, 1.0),
        "nt": Field(int, 256),
        "ny": Field(int, 256),
        "snapshot_times": Field(_floats, ()),
        "mc_paths": Field(int, 100_000),
        "bins": Field(int, 80),
        "substeps": Field(int, 16),
        "max_l1": Field(_optional(float), None),
    },
    "special": {
        "function": Field(str, "mittag_leffler"),
        "beta": Field(float, 0.5),
        "z": Field(float, -1.0),
        "x": Field(float, 1.0),
        "t": Field(float, 1.0),
        "expected": Field(_optional(float), None),
        "rtol": Field(float, 1e-8),
    },
})


def _locate(text: str, section: str, key: str | None) -> tuple[int | None, str | None]:
    """Line number (1-based) and source line of ``key`` in ``section``."""
    current = None
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip()
            if key is None and current == section:
                return n, raw
            continue
        if current == section and key is not None:
            name = line.split("=", 1)[0].split(":", 1)[0].strip()
            if name == key:
                return n, raw
    return None, None


def _error(
        msg: str,
        text: str,
        section: str,
        key: str | None = None,
) -> ConfigurationError:
    line, src = _locate(text, section, key)
    return ConfigurationError(msg, key=key, section=section, line=line, src=src)


@dataclass(frozen=True)
class RunSettings:
    """Validated contents of a run configuration."""

    command: str
    values: Mapping[str, Mapping[str, Any]]
    source: str = ""

    def section(self, name: str) -> Mapping[str, Any]:
        return self.values[name]

    @property
    def run(self) -> Mapping[str, Any]:
        return self.values["run"]

    @property
    def seed(self) -> int:
        return int(self.run["seed"])

    @property
    def n_paths(self) -> int:
        return int(self.run["n_paths"])

    @property
    def output_dir(self) -> Path:
        return Path(self.run["output_dir"])

    def clock(self) -> ClockSpec:
        c = self.values["clock"]
        try:
            return ClockSpec(
                kind=c["kind"],
                step=c["step"],
                horizon=c["horizon"],
                beta=c["beta"],
                scale_low=c["scale_low"],
                scale_high=c["scale_high"],
                path=c["path"],
            )
        except ConfigurationError as err:
            raise _error(str(err), self.source, "clock", err.key) from err

    def model(self) -> ModelPreset | LinearCoeffs:
        """
        The configured model: a preset, or ``preset = linear`` for constant
        linear coefficients ``rho1 .. sigma2`` and ``x0``.
        """
        m = self.values["model"]
        given = {k: v for k, v in m.items() if k != "preset" and v is not None}
        try:
            if m["preset"] == "linear":
                extra = set(given) - {*_LINEAR_KEYS, "x0"}
                if extra:
                    key = sorted(extra)[0]
                    msg = f"unknown parameter {key!r} for linear coefficients"
                    raise ConfigurationError(msg, key=key)
                return LinearCoeffs(**given)
            return ModelPreset(m["preset"], given)
        except ConfigurationError as err:
            raise _error(str(err), self.source, "model", err.key) from err

    def to_dict(self) -> dict[str, Any]:
        return {"command": self.command, **{k: dict(v) for k, v in self.values.items()}}

    @property
    def digest(self) -> str:
        return digest(dumps(self.to_dict()).encode("utf-8"), person=b"config").hex()


def _apply_overrides(
        parser: configparser.ConfigParser,
        overrides: Sequence[str],
) -> None:
    for item in overrides:
        if "=" not in item:
            msg = f"override {item!r} is not of the form section.key=value"
            raise ConfigurationError(msg, key=item)
        name, value = item.split("=", 1)
        section, _, key = name.strip().rpartition(".")
        section = section or "run"
        if not parser.has_section(section):
            parser.add_section(section)
        parser.set(section, key, value.strip())


def parse_settings(
        text: str,
        overrides: Sequence[str] = (),
        command: str | None = None,
) -> RunSettings:
    """
    Validate a configuration given as text.

    Parameters
    ----------
    overrides
        ``section.key=value`` items applied on top of the file; a key
        without a section belongs to ``[run]``.
    command
        Command requested on the command line; it must agree with
        ``run.command`` when both are given.
    """
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str  # type: ignore[assignment,method-assign]
    try:
        parser.read_string(text)
    except configparser.Error as err:
        line = getattr(err, "lineno", None)
        msg = f"unreadable configuration: {err.message if hasattr(err, 'message') else err}"
        raise ConfigurationError(msg, line=line) from err
    _apply_overrides(parser, overrides)

    values: dict[str, dict[str, Any]] = {}
    for section in parser.sections():
        if section not in SCHEMA:
            msg = f"unknown section [{section}]; expected one of {sorted(SCHEMA)}"
            raise _error(msg, text, section)
        for key in parser[section]:
            if key not in SCHEMA[section]:
                msg = f"unknown key {key!r}"
                raise _error(msg, text, section, key)

    for section, fields in SCHEMA.items():
        values[section] = {}
        for key, spec in fields.items():
            if parser.has_option(section, key):
                raw = parser.get(section, key)
                try:
                    values[section][key] = spec.parse(raw)
                except ValueError as err:
                    msg = f"invalid value {raw!r}: {err}"
                    raise _error(msg, text, section, key) from err
            else:
                values[section][key] = spec.default

    configured = values["run"]["command"]
    if command is not None and configured is not None and command != configured:
        msg = f"the file configures {configured!r} but {command!r} was requested"
        raise _error(msg, text, "run", "command")
    chosen = command or configured
    if chosen not in COMMANDS:
        msg = f"command must be one of {list(COMMANDS)}, got {chosen!r}"
        raise _error(msg, text, "run", "command")
    values["run"]["command"] = chosen
    for key in ("n_paths", "threads"):
        n = values["run"][key]
        if n is not None and n < 1:
            msg = f"{key} must be at least 1, got {n}"
            raise _error(msg, text, "run", key)

    frozen = MappingProxyType({k: MappingProxyType(v) for k, v in values.items()})
    logger.debug("configuration for %r parsed", chosen)
    return RunSettings(command=chosen, values=frozen, source=text)


def load_settings(
        path: Path | str | None,
        overrides: Sequence[str] = (),
        command: str | None = None,
) -> RunSettings:
    """Read and validate a configuration file; ``None`` uses the defaults."""
    if path is None:
        text = ""
    else:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as err:
            msg = f"cannot read configuration {str(path)!r}: {err.strerror}"
            raise ConfigurationError(msg, key="config") from err
    return parse_settings(text, overrides, command)
