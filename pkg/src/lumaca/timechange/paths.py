from __future__ import annotations

import math
from typing import TYPE_CHECKING, Any

import numpy as np
import polars as pl

from lumaca.exceptions import ConfigurationError, HorizonExceededError

if TYPE_CHECKING:
    from lumaca.typing import ArrayLike, FloatArray, Interpolation

__all__ = ["MonotonePath", "uniform_grid"]

# relative slack accepted when evaluating at the right end of a grid
_HORIZON_RTOL = 1e-12


def uniform_grid(step: float, horizon: float) -> FloatArray:
    """
    Grid ``0, step, 2*step, ...`` covering ``[0, horizon]``.

    When ``horizon`` is a whole number of steps (up to rounding) the last
    point is ``horizon`` itself; otherwise the grid overshoots by less than
    one step.
    """
    if not (math.isfinite(step) and step > 0):
        msg = f"step must be a positive real, got {step}"
        raise ConfigurationError(msg, key="step")
    if not (math.isfinite(horizon) and horizon >= step):
        msg = f"horizon must be a real >= step, got {horizon}"
        raise ConfigurationError(msg, key="horizon")
    n = round(horizon / step)
    if abs(n * step - horizon) <= 1e-9 * horizon:
        return np.linspace(0.0, horizon, n + 1)
    n = math.ceil(horizon / step)
    return step * np.arange(n + 1, dtype=np.float64)


def _frozen(values: Any) -> FloatArray:
    arr = np.array(values, dtype=np.float64)
    if arr.ndim != 1:
        msg = f"expected a one-dimensional sequence, got shape {arr.shape}"
        raise ConfigurationError(msg)
    arr.flags.writeable = False
    return arr


class _GridPath:
    """
    A real path sampled on a strictly increasing grid starting at 0.

    Instances are immutable: their arrays are read-only.
    """

    __slots__ = ("_eps", "_grid", "_interp", "_values")

    kind: str = "path"

    def __init__(
            self,
            grid: ArrayLike | list[float],
            values: ArrayLike | list[float],
            interp: Interpolation = "step",
    ) -> None:
        self._grid = _frozen(grid)
        self._values = _frozen(values)
        if interp not in ("step", "linear"):
            msg = f"interp must be 'step' or 'linear', got {interp!r}"
            raise ConfigurationError(msg, key="interp")
        self._interp: Interpolation = interp
        self._validate()
        self._eps = (
            1e-9 * float(np.min(np.diff(self._grid))) if len(self) > 1 else 0.0
        )

    def _validate(self) -> None:
        grid, values = self._grid, self._values
        if grid.size == 0:
            msg = "a path needs at least one grid point"
            raise ConfigurationError(msg)
        if grid.shape != values.shape:
            msg = (
                f"grid and values differ in length "
                f"({grid.size} != {values.size})"
            )
            raise ConfigurationError(msg)
        if grid[0] != 0.0:
            msg = f"grid must start at 0, got {grid[0]}"
            raise ConfigurationError(msg)
        if grid.size > 1 and not np.all(np.diff(grid) > 0):
            msg = "grid must be strictly increasing"
            raise ConfigurationError(msg)
        if not np.all(np.isfinite(values)):
            msg = "path values must be finite"
            raise ConfigurationError(msg)

    # ------------------------------------------------------------------

    @property
    def grid(self) -> FloatArray:
        return self._grid

    @property
    def values(self) -> FloatArray:
        return self._values

    @property
    def interp(self) -> Interpolation:
        return self._interp

    @property
    def horizon(self) -> float:
        return float(self._grid[-1])

    def __len__(self) -> int:
        return int(self._grid.size)

    def __repr__(self) -> str:
        return (
            f"{type(self).__name__}(n={len(self)}, horizon={self.horizon:g}, "
            f"interp={self._interp!r})"
        )

    # ------------------------------------------------------------------

    def _check_range(self, t: FloatArray) -> None:
        if t.size == 0:
            return
        slack = _HORIZON_RTOL * max(1.0, self.horizon)
        lo, hi = float(np.min(t)), float(np.max(t))
        if lo < -slack or hi > self.horizon + slack or not math.isfinite(hi):
            msg = (
                f"evaluation range [{lo:g}, {hi:g}] exceeds the path horizon "
                f"[0, {self.horizon:g}]"
            )
            raise HorizonExceededError(msg)

    def __call__(self, t: ArrayLike) -> FloatArray:
        """Evaluate the path under its interpolation convention."""
        t_arr = np.asarray(t, dtype=np.float64)
        self._check_range(t_arr)
        t_arr = np.clip(t_arr, 0.0, self.horizon)
        if self._interp == "linear":
            return np.interp(t_arr, self._grid, self._values)
        # points within rounding distance of a grid point count as on it
        idx = np.searchsorted(self._grid, t_arr + self._eps, side="right") - 1
        return self._values[np.clip(idx, 0, len(self) - 1)]

    def left_limit(self, t: ArrayLike) -> FloatArray:
        """
        Left limit ``z(t-)``; at 0 it is the initial value.

        Under step interpolation a grid point's left limit is the value at the
        previous grid point.
        """
        t_arr = np.asarray(t, dtype=np.float64)
        self._check_range(t_arr)
        t_arr = np.clip(t_arr, 0.0, self.horizon)
        if self._interp == "linear":
            return np.interp(t_arr, self._grid, self._values)
        idx = np.searchsorted(self._grid, t_arr - self._eps, side="left") - 1
        return self._values[np.clip(idx, 0, len(self) - 1)]

    def increments(self) -> FloatArray:
        return np.diff(self._values)

    # ------------------------------------------------------------------

    def to_frame(self) -> pl.DataFrame:
        """Columns ``t`` and ``value``."""
        return pl.DataFrame(
            {"t": self._grid, "value": self._values},
            schema={"t": pl.Float64, "value": pl.Float64},
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "grid": self._grid.tolist(),
            "values": self._values.tolist(),
            "interp": self._interp,
        }

    def __eq__(self, other: object) -> bool:
        if type(other) is not type(self):
            return NotImplemented
        return self.to_dict() == other.to_dict()  # type: ignore[attr-defined]

    __hash__ = None  # type: ignore[assignment]


class MonotonePath(_GridPath):
    """
    Nondecreasing path: a subordinator ``D`` or a time-change ``E``.

    Parameters
    ----------
    grid
        Strictly increasing time points starting at 0.
    values
        Nondecreasing values with ``values[0] >= 0``.
    interp
        ``"step"`` for cadlag step paths (jumps are real), ``"linear"`` for
        paths that are continuous at grid resolution.

    Notes
    -----
    Under step interpolation every positive increment is a jump at the grid
    point where it lands; under linear interpolation the path is continuous.
    """

    __slots__ = ()

    kind = "monotone"

    def _validate(self) -> None:
        super()._validate()
        if self._values[0] < 0:
            msg = f"a monotone path starts at a value >= 0, got {self._values[0]}"
            raise ConfigurationError(msg)
        if len(self) > 1 and np.any(np.diff(self._values) < 0):
            msg = "values of a monotone path must be nondecreasing"
            raise ConfigurationError(msg)

    @property
    def is_strictly_increasing(self) -> bool:
        return bool(len(self) > 1 and np.all(np.diff(self._values) > 0))

    @property
    def is_continuous(self) -> bool:
        return self._interp == "linear"

    def jump_indices(self) -> np.ndarray:
        """Grid indices at which the path jumps (empty for linear paths)."""
        if self._interp == "linear":
            return np.empty(0, dtype=np.intp)
        return np.nonzero(np.diff(self._values) > 0)[0] + 1

    @classmethod
    def identity(
            cls,
            grid: ArrayLike | list[float],
            interp: Interpolation = "linear",
    ) -> MonotonePath:
        g = np.asarray(grid, dtype=np.float64)
        return cls(g, g, interp)
