from __future__ import annotations

__all__ = [
    "LumacaError",
    "ConfigurationError",
    "GridMismatchError",
    "HorizonExceededError",
    "UnsupportedBracketError",
    "DualityUnsupportedError",
    "DivergenceError",
    "NearSingularityError",
    "ScalingError",
    "SpecialFunctionDomainError",
    "AccuracyError",
    "NumericalError",
    "CheckFailedError",
    "AccuracyWarning",
]


class LumacaError(Exception):
    """Base class of every error raised by lumaca."""


class ConfigurationError(LumacaError, ValueError):
    """
    Invalid parameters or configuration file.

    When the offending entry comes from a config file, ``section``, ``key``
    and ``line`` locate it and the source line is echoed with a caret under
    the key.
    """

    def __init__(
            self,
            message: str,
            *,
            key: str | None = None,
            section: str | None = None,
            line: int | None = None,
            src: str | None = None,
    ) -> None:
        self.key = key
        self.section = section
        self.line = line

        location = []
        if section is not None:
            location.append(f"[{section}]")
        if key is not None:
            location.append(f"{key!r}")
        if line is not None:
            location.append(f"line {line}")
        if location:
            message = f"{message} ({' '.join(location)})"

        if src is not None and key is not None:
            pos = src.find(key)
            if pos >= 0:
                caret = " " * pos + "^" * len(key)
                message = f"{message}\n  {src}\n  {caret}"
        super().__init__(message)


class GridMismatchError(LumacaError, ValueError):
    """Two paths were combined on different grids."""


class HorizonExceededError(LumacaError, ValueError):
    """A path was evaluated beyond the range it covers."""


class UnsupportedBracketError(LumacaError, ValueError):
    """The operation needs a double-bracket pair (continuous time-change)."""


class DualityUnsupportedError(LumacaError, ValueError):
    """The duality route was requested for an SDE with a dt coefficient."""


class DivergenceError(LumacaError, ArithmeticError):
    """The numerical state became non-finite or exceeded the bound."""

    def __init__(
            self,
            message: str,
            *,
            step_index: int | None = None,
            time: float | None = None,
    ) -> None:
        self.step_index = step_index
        self.time = time
        super().__init__(message)


class NearSingularityError(LumacaError, ArithmeticError):
    """A fundamental matrix became numerically singular."""

    def __init__(
            self,
            message: str,
            *,
            condition: float,
            step_index: int,
    ) -> None:
        self.condition = condition
        self.step_index = step_index
        super().__init__(message)


class ScalingError(LumacaError, ArithmeticError):
    """A fundamental solution underflowed."""


class SpecialFunctionDomainError(LumacaError, ValueError):
    """Argument outside the supported domain of a special function."""


class AccuracyError(LumacaError, ArithmeticError):
    """A series did not reach the requested accuracy."""

    def __init__(self, message: str, *, achieved: float) -> None:
        self.achieved = achieved
        super().__init__(f"{message} (achieved bound {achieved:.3e})")


class NumericalError(LumacaError, ArithmeticError):
    """A linear solve failed."""


class CheckFailedError(LumacaError, AssertionError):
    """A configured assertion did not hold."""

    def __init__(self, message: str, *, check: str) -> None:
        self.check = check
        super().__init__(f"{check}: {message}")


class AccuracyWarning(UserWarning):
    """A computation finished but its accuracy is degraded."""
