"""
Running integrals along a driver.

Deterministic ``ds`` integrals use the trapezoid rule; ``dE`` and
``d(B o E)`` integrals are forward sums with the integrand at the left end of
each cell. A cell on which the clock does not move contributes exactly zero,
whatever the integrand evaluates to there.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
import scipy.integrate

from lumaca.exceptions import DivergenceError

if TYPE_CHECKING:
    from lumaca.sde_engine.driver import DrivingTriple
    from lumaca.typing import FloatArray

__all__ = ["DriverArrays", "finite_or_raise", "left_sum", "trapezoid"]


def trapezoid(values: FloatArray, grid: FloatArray) -> FloatArray:
    """Running trapezoid integral starting at 0."""
    return scipy.integrate.cumulative_trapezoid(values, grid, initial=0.0)


def left_sum(values: FloatArray, increments: FloatArray) -> FloatArray:
    """
    Running forward sum ``sum_i values[i] * increments[i]`` starting at 0.

    ``values`` holds the integrand at the left end of every cell (its last
    entry, if present, is ignored). Cells with a zero increment contribute 0.
    """
    v = np.asarray(values, dtype=np.float64)[: increments.size]
    with np.errstate(invalid="ignore"):
        terms = np.where(increments != 0.0, v * increments, 0.0)
    return np.concatenate([[0.0], np.cumsum(terms)])


def finite_or_raise(name: str, values: FloatArray, grid: FloatArray) -> FloatArray:
    bad = np.nonzero(~np.isfinite(values))[0]
    if bad.size:
        i = int(bad[0])
        msg = f"{name} is not finite from t = {grid[i]:g} on"
        raise DivergenceError(msg, step_index=i, time=float(grid[i]))
    return values


@dataclass(frozen=True)
class DriverArrays:
    """
    Outer arrays of a driver.

    Attributes
    ----------
    t
        Outer grid.
    u
        Clock values ``E_t`` where coefficients are evaluated.
    clock
        ``E_t - E_0``.
    noise
        ``B(E_t) - B(E_0)``.
    """

    t: FloatArray
    u: FloatArray
    clock: FloatArray
    noise: FloatArray

    @classmethod
    def of(cls, driver: DrivingTriple) -> DriverArrays:
        u = driver.pair.e.values
        return cls(
            t=driver.grid,
            u=u,
            clock=u - u[0],
            noise=driver.b_of_e.values,
        )

    @property
    def dt(self) -> FloatArray:
        return np.diff(self.t)

    @property
    def de(self) -> FloatArray:
        return np.diff(self.u)

    @property
    def db(self) -> FloatArray:
        return np.diff(self.noise)
