# This module has been adapted from:
#     https://github.com/pola-rs/polars/blob/main/py-polars/polars/config.py
#
# py-polars/polars/config.py is distributed with the following license
#
# '''
# Copyright (c) 2025 Ritchie Vink
# Some portions Copyright (c) 2024 NVIDIA CORPORATION & AFFILIATES. All rights reserved.
#
# Permission is hereby granted, free of charge, to any person obtaining a copy
# of this software and associated documentation files (the "Software"), to deal
# in the Software without restriction, including without limitation the rights
# to use, copy, modify, merge, publish, distribute, sublicense, and/or sell
# copies of the Software, and to permit persons to whom the Software is
# furnished to do so, subject to the following conditions:
#
# The above copyright notice and this permission notice shall be included in all
# copies or substantial portions of the Software.
#
# THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
# IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
# FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
# AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER
# LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING FROM,
# OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS IN THE
# SOFTWARE.
# '''

from __future__ import annotations

import contextlib
import json
import os
from pathlib import Path
from typing import TYPE_CHECKING, Any, ClassVar, Literal, TypedDict

from lumaca.exceptions import ConfigurationError

if TYPE_CHECKING:
    import sys
    from types import TracebackType

    if sys.version_info >= (3, 11):
        from typing import Self, Unpack
    else:
        from typing_extensions import Self, Unpack

__all__ = ["Config"]

# the thread override is the only environment variable lumaca reads
_LUMACA_CFG_ENV_VARS = {
    "THREADS",
}

SyncKind = Literal["exact", "simulated"]

_DEFAULTS: dict[str, Any] = {
    "batch_size": 256,
    "sync_atol_exact": 1e-12,
    "sync_atol_simulated": 1e-9,
    "divergence_bound": 1e15,
    "condition_bound": 1e12,
}


class ConfigParameters(TypedDict, total=False):
    """Parameters supported by the lumaca Config."""

    threads: int | None
    batch_size: int | None
    sync_atol_exact: float | None
    sync_atol_simulated: float | None
    divergence_bound: float | None
    condition_bound: float | None

    set_threads: int | None
    set_batch_size: int | None
    set_sync_atol_exact: float | None
    set_sync_atol_simulated: float | None
    set_divergence_bound: float | None
    set_condition_bound: float | None


class Config(contextlib.ContextDecorator):
    """
    Configuration.

    Notes
    -----
    Can also be used as a context manager OR a function decorator in order to
    temporarily scope the lifetime of specific options.

    Examples
    --------
    >>> import lumaca as lm
    >>> from lumaca.timechange import sample_clock
    >>> with lm.Config(threads=4, batch_size=64):
    ...     e = sample_clock(0.5, [1.0], n_paths=256, step=1e-2, seed=7)
    >>> e.shape
    (256, 1)

    Parallelism
    -----------
    threads, batch_size

    Tolerances
    ----------
    sync_atol_exact, sync_atol_simulated, divergence_bound, condition_bound

    Settings
    --------
    load, save, state, restore_defaults
    """

    _context_options: ConfigParameters | None = None
    _original_state: str = ""

    # options that do not live in the environment
    _direct: ClassVar[dict[str, Any]] = dict(_DEFAULTS)

    def __init__(
            self,
            *,
            restore_defaults: bool = False,
            apply_on_context_enter: bool = False,
            **options: Unpack[ConfigParameters],
    ) -> None:
        """
        Initialise a Config object instance for context manager usage.

        Any `options` kwargs should correspond to the available named "set_*"
        methods, but are allowed to omit the "set_" prefix for brevity.

        Parameters
        ----------
        restore_defaults
            set all options to their default values (this is applied before
            setting any other options).
        apply_on_context_enter
            defer applying the options until a context is entered.
        **options
            keyword args that will set the option; equivalent to calling the
            named "set_<option>" method with the given value.
        """
        self._original_state = self.save()
        if restore_defaults:
            self.restore_defaults()

        if apply_on_context_enter:
            self._context_options = options
        else:
            self._set_config_params(**options)
            self._context_options = None

    def __enter__(self) -> Self:
        """Support setting Config options that are reset on scope exit."""
        self._original_state = self._original_state or self.save()
        if self._context_options:
            self._set_config_params(**self._context_options)
        return self

    def __exit__(
            self,
            exc_type: type[BaseException] | None,
            exc_val: BaseException | None,
            exc_tb: TracebackType | None,
    ) -> None:
        """Reset any Config options that were set within the scope."""
        self.restore_defaults().load(self._original_state)
        self._original_state = ""

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Config):
            return False
        return (self._original_state == other._original_state) and (
                self._context_options == other._context_options
        )

    def __ne__(self, other: object) -> bool:
        return not self.__eq__(other)

    def _set_config_params(
            self, **options: Unpack[ConfigParameters]
    ) -> None:
        for opt, value in options.items():
            # getters share the option names, so setters always win
            if not opt.startswith("set_"):
                opt = f"set_{opt}"
            if not hasattr(self, opt):
                msg = f"`Config` has no option {opt!r}"
                raise AttributeError(msg)
            getattr(self, opt)(value)

    # ------------------------------------------------------------------

    @classmethod
    def load(cls, cfg: str) -> Config:
        """
        Load (and set) previously saved Config options from a JSON string.

        Parameters
        ----------
        cfg : str
            JSON string produced by `Config.save()`.
        """
        try:
            options = json.loads(cfg)
        except json.JSONDecodeError as err:
            msg = "invalid Config string (did you mean to use `load_from_file`?)"
            raise ValueError(msg) from err

        cfg_load = Config()
        for key, opt in options.get("environment", {}).items():
            if opt is None:
                os.environ.pop(key, None)
            else:
                os.environ[key] = opt

        for name, value in options.get("direct", {}).items():
            setter = f"set_{name}"
            if hasattr(cfg_load, setter):
                getattr(cfg_load, setter)(value)
        return cfg_load

    @classmethod
    def load_from_file(cls, file: Path | str) -> Config:
        """
        Load (and set) previously saved Config options from file.

        Parameters
        ----------
        file : Path | str
            File path to a JSON string produced by `Config.save()`.
        """
        try:
            options = Path(file).expanduser().read_text()
        except OSError as err:
            msg = f"invalid Config file (did you mean to use `load`?)\n{err}"
            raise ValueError(msg) from err
        return cls.load(options)

    @classmethod
    def restore_defaults(cls) -> type[Config]:
        """Reset all lumaca Config settings to their default state."""
        for var in _LUMACA_CFG_ENV_VARS:
            os.environ.pop(var, None)
        cls._direct = dict(_DEFAULTS)
        return cls

    @classmethod
    def save(cls, if_set: bool = False) -> str:
        """
        Save the current set of Config options as a JSON string.

        Parameters
        ----------
        if_set
            By default this will save the state of all configuration options;
            set to `True` to save only those that differ from the defaults.

        Returns
        -------
        str
            JSON string containing current Config options.
        """
        environment_vars = {
            key: os.environ.get(key)
            for key in sorted(_LUMACA_CFG_ENV_VARS)
            if not if_set or (os.environ.get(key) is not None)
        }
        direct = {
            key: value
            for key, value in sorted(cls._direct.items())
            if not if_set or value != _DEFAULTS[key]
        }
        return json.dumps(
            {"environment": environment_vars, "direct": direct},
            separators=(",", ":"),
        )

    @classmethod
    def save_to_file(cls, file: Path | str) -> None:
        """
        Save the current set of Config options as a JSON file.

        Parameters
        ----------
        file
            Path to a file into which the JSON string will be written.
        """
        Path(file).expanduser().resolve().write_text(cls.save())

    @classmethod
    def state(cls, if_set: bool = False) -> dict[str, Any]:
        """
        Show the current state of all Config options as a dict.

        Parameters
        ----------
        if_set
            Restrict the returned dictionary to options that have been set
            to a non-default value.
        """
        state: dict[str, Any] = {
            var: os.environ.get(var)
            for var in sorted(_LUMACA_CFG_ENV_VARS)
            if not if_set or (os.environ.get(var) is not None)
        }
        for key, value in sorted(cls._direct.items()):
            if not if_set or value != _DEFAULTS[key]:
                state[key] = value
        return state

    # ------------------------------------------------------------------ getters

    @classmethod
    def threads(cls) -> int:
        """Number of worker threads for ensemble runs (`THREADS`, default 1)."""
        raw = os.environ.get("THREADS")
        if raw is None or not raw.strip():
            return 1
        try:
            value = int(raw)
        except ValueError as err:
            msg = f"THREADS must be an integer >= 1, got {raw!r}"
            raise ConfigurationError(msg, key="threads") from err
        if value < 1:
            msg = f"THREADS must be an integer >= 1, got {raw!r}"
            raise ConfigurationError(msg, key="threads")
        return value

    @classmethod
    def batch_size(cls) -> int:
        """Paths per parallel work unit."""
        return int(cls._direct["batch_size"])

    @classmethod
    def sync_atol(cls, kind: SyncKind = "simulated") -> float:
        """Absolute tolerance of the synchronization predicate."""
        return float(cls._direct[f"sync_atol_{kind}"])

    @classmethod
    def divergence_bound(cls) -> float:
        """Magnitude above which a numerical state counts as diverged."""
        return float(cls._direct["divergence_bound"])

    @classmethod
    def condition_bound(cls) -> float:
        """Condition number above which a fundamental matrix is singular."""
        return float(cls._direct["condition_bound"])

    # ------------------------------------------------------------------ setters

    @classmethod
    def set_threads(cls, threads: int | None) -> type[Config]:
        """
        Worker threads used by ensemble simulations.

        Group
        -----
            Parallelism
        """
        if threads is None:
            os.environ.pop("THREADS", None)
        else:
            if int(threads) < 1:
                msg = f"threads must be >= 1, got {threads}"
                raise ConfigurationError(msg, key="threads")
            os.environ["THREADS"] = str(int(threads))
        return cls

    @classmethod
    def set_batch_size(cls, batch_size: int | None) -> type[Config]:
        """
        Number of paths simulated per work unit.

        Group
        -----
            Parallelism
        """
        if batch_size is None:
            batch_size = _DEFAULTS["batch_size"]
        if int(batch_size) < 1:
            msg = f"batch_size must be >= 1, got {batch_size}"
            raise ConfigurationError(msg, key="batch_size")
        cls._direct["batch_size"] = int(batch_size)
        return cls

    @classmethod
    def set_sync_atol_exact(cls, atol: float | None) -> type[Config]:
        """
        Synchronization tolerance for exact-arithmetic fixtures.

        Group
        -----
            Tolerances
        """
        cls._direct["sync_atol_exact"] = _positive(
            "sync_atol_exact", atol
        )
        return cls

    @classmethod
    def set_sync_atol_simulated(cls, atol: float | None) -> type[Config]:
        """
        Synchronization tolerance for simulated paths.

        Group
        -----
            Tolerances
        """
        cls._direct["sync_atol_simulated"] = _positive(
            "sync_atol_simulated", atol
        )
        return cls

    @classmethod
    def set_divergence_bound(cls, bound: float | None) -> type[Config]:
        """
        Abort solvers once |x| exceeds this bound.

        Group
        -----
            Tolerances
        """
        cls._direct["divergence_bound"] = _positive(
            "divergence_bound", bound
        )
        return cls

    @classmethod
    def set_condition_bound(cls, bound: float | None) -> type[Config]:
        """
        Largest accepted condition number of a fundamental matrix.

        Group
        -----
            Tolerances
        """
        cls._direct["condition_bound"] = _positive(
            "condition_bound", bound
        )
        return cls


def _positive(name: str, value: float | None) -> float:
    if value is None:
        return float(_DEFAULTS[name])
    value = float(value)
    if not value > 0:
        msg = f"{name} must be > 0, got {value}"
        raise ConfigurationError(msg, key=name)
    return value
