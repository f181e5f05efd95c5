from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from lumaca.exceptions import (
    ConfigurationError,
    HorizonExceededError,
    UnsupportedBracketError,
)
from lumaca.timechange.paths import MonotonePath, uniform_grid
from lumaca.utils.config import Config

if TYPE_CHECKING:
    from lumaca.path_calculus.cadlag import CadlagPath
    from lumaca.typing import ArrayLike, Bracket, Interpolation

logger = logging.getLogger(__name__)

__all__ = [
    "TimeChangePair",
    "generalized_inverse",
    "is_synchronized",
    "make_pair",
]


def generalized_inverse(
        d: MonotonePath,
        out_grid: ArrayLike,
        *,
        interp: Interpolation = "linear",
) -> MonotonePath:
    """
    First hitting times ``e(t) = inf{u : d(u) > t}`` on ``out_grid``.

    Under step interpolation of ``d`` the infimum is the first grid point
    whose value exceeds ``t``; under linear interpolation it is the crossing
    point inside the first cell that ends above ``t``.

    Parameters
    ----------
    d
        Nondecreasing path to invert.
    out_grid
        Strictly increasing grid starting at 0, inside ``[0, max d)``.
    interp
        Interpolation of the returned path (inverses are stored linear).

    Raises
    ------
    HorizonExceededError
        If ``out_grid`` reaches ``max(d.values)``, where the inverse is not
        defined on the covered horizon.
    """
    t = np.asarray(out_grid, dtype=np.float64)
    top = float(d.values[-1])
    if t.size and t[-1] >= top:
        msg = (
            f"inverse requested up to t={t[-1]:g} but the path only reaches "
            f"{top:g}"
        )
        raise HorizonExceededError(msg)

    grid, values = d.grid, d.values
    j = np.searchsorted(values, t, side="right")
    if d.interp == "step":
        e = grid[j]
    else:
        prev = np.maximum(j - 1, 0)
        rise = values[j] - values[prev]
        with np.errstate(divide="ignore", invalid="ignore"):
            frac = np.where(rise > 0, (t - values[prev]) / rise, 0.0)
        e = np.where(
            j == 0,
            grid[0],
            grid[prev] + np.clip(frac, 0.0, 1.0) * (grid[j] - grid[prev]),
        )
    # cummax removes rounding wiggles of the crossing points
    return MonotonePath(t, np.maximum.accumulate(e), interp)


@dataclass(frozen=True)
class TimeChangePair:
    """
    A subordinator-type path ``d`` and its generalized inverse ``e``.

    Attributes
    ----------
    d
        The nondecreasing path ``D`` (or a general ``S``).
    e
        Its generalized inverse, the time-change ``E`` (or ``T``).
    bracket
        ``"double"`` when ``d`` is strictly increasing (so ``e`` is
        continuous), ``"single"`` otherwise.
    """

    d: MonotonePath
    e: MonotonePath
    bracket: Bracket

    def __post_init__(self) -> None:
        if self.bracket not in ("single", "double"):
            msg = f"bracket must be 'single' or 'double', got {self.bracket!r}"
            raise ConfigurationError(msg, key="bracket")
        if self.bracket == "double" and not self.d.is_strictly_increasing:
            msg = "a double-bracket pair needs a strictly increasing d"
            raise ConfigurationError(msg, key="bracket")

    @property
    def is_double(self) -> bool:
        return self.bracket == "double"

    @property
    def outer_grid(self) -> np.ndarray:
        return self.e.grid

    @property
    def horizon(self) -> float:
        return self.e.horizon

    def require_double(self, operation: str) -> None:
        if not self.is_double:
            msg = f"{operation} needs a double-bracket (continuous) time-change"
            raise UnsupportedBracketError(msg)

    @classmethod
    def from_time_change(
            cls,
            e: MonotonePath,
            inner_step: float | None = None,
    ) -> TimeChangePair:
        """
        Pair a supplied time-change with its generalized inverse.

        The inverse ``d`` is evaluated on a uniform inner grid of spacing
        ``inner_step`` strictly below ``max(e)``.
        """
        top = float(e.values[-1])
        if inner_step is None:
            inner_step = float(np.min(np.diff(e.grid)))
        if top <= inner_step:
            msg = (
                f"time-change reaches only {top:g}; its inverse needs a range "
                f"wider than one inner step ({inner_step:g})"
            )
            raise ConfigurationError(msg, key="inner_step")
        inner = uniform_grid(inner_step, top)
        inner = inner[inner < top]
        d = generalized_inverse(e, inner, interp="step")
        bracket: Bracket = "double" if d.is_strictly_increasing else "single"
        return cls(d=d, e=e, bracket=bracket)


def make_pair(
        d: MonotonePath,
        out_grid: ArrayLike | None = None,
) -> TimeChangePair:
    """
    Pair ``d`` with its generalized inverse.

    Parameters
    ----------
    d
        Nondecreasing path.
    out_grid
        Grid of the inverse. Defaults to ``d``'s own grid truncated below
        ``max(d.values)``.

    Returns
    -------
    TimeChangePair
        ``bracket="double"`` iff every increment of ``d`` is positive.
    """
    if out_grid is None:
        top = float(d.values[-1])
        out_grid = d.grid[d.grid < top]
    e = generalized_inverse(d, out_grid)
    bracket: Bracket = "double" if d.is_strictly_increasing else "single"
    logger.debug("paired path of %d points as %s bracket", len(d), bracket)
    return TimeChangePair(d=d, e=e, bracket=bracket)


def is_synchronized(
        z: CadlagPath | MonotonePath,
        t: MonotonePath,
        *,
        atol: float | None = None,
        exact: bool = False,
) -> bool:
    """
    Whether ``z`` is constant on every interval ``[t(s-), t(s)]``.

    Parameters
    ----------
    z
        Path on the inner clock.
    t
        Time-change; only its jumps constrain ``z``.
    atol
        Absolute tolerance. Defaults to ``Config.sync_atol("exact")`` when
        ``exact`` is set, else ``Config.sync_atol("simulated")``.
    """
    if atol is None:
        atol = Config.sync_atol("exact" if exact else "simulated")

    jumps = t.jump_indices()
    if jumps.size == 0:
        return True

    z_grid, z_values = z.grid, z.values
    for i in jumps:
        lo = float(t.values[i - 1])
        hi = min(float(t.values[i]), z.horizon)
        if lo > z.horizon:
            continue
        a = int(np.searchsorted(z_grid, lo, side="left"))
        b = int(np.searchsorted(z_grid, hi, side="right"))
        start = float(z(lo))
        inside = z_values[a:b]
        if inside.size and np.max(np.abs(inside - start)) > atol:
            return False
        if abs(float(z(hi)) - start) > atol:
            return False
    return True
