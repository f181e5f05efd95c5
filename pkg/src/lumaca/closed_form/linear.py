"""
Explicit solutions of linear time-changed SDEs.

For ``dX = (rho1 + rho2 X) dt + (mu1 + mu2 X) dE + (sigma1 + sigma2 X) dB_E``
the fundamental solution is

``Phi_t = exp{int rho2 ds + int (mu2 - sigma2**2 / 2) dE + int sigma2 dB_E}``

and ``X = Phi [x0 + int rho1 / Phi ds + int (mu1 - sigma2 sigma1) / Phi dE
+ int sigma1 / Phi dB_E]``.
"""

from __future__ import annotations

import logging
import math
from typing import TYPE_CHECKING, Literal

import numpy as np

from lumaca.closed_form.quadrature import (
    DriverArrays,
    finite_or_raise,
    left_sum,
    trapezoid,
)
from lumaca.exceptions import HorizonExceededError, ScalingError
from lumaca.path_calculus.cadlag import CadlagPath
from lumaca.path_calculus.integrals import (
    compose_increment,
    ito_sum,
    through_inverse,
)

if TYPE_CHECKING:
    from lumaca.closed_form.coeffs import LinearCoeffs
    from lumaca.sde_engine.driver import DrivingTriple
    from lumaca.typing import FloatArray

logger = logging.getLogger(__name__)

__all__ = [
    "fundamental_solution",
    "general_linear_solution",
    "inner_clock_solution",
    "log_fundamental",
]

_UNDERFLOW = math.log(1e-300)


def _coefficients(
        c: LinearCoeffs,
        arr: DriverArrays,
        *names: str,
) -> list[FloatArray]:
    with np.errstate(all="ignore"):
        return [np.array(c.evaluate(n, arr.t, arr.u)) for n in names]


def log_fundamental(c: LinearCoeffs, driver: DrivingTriple) -> FloatArray:
    """``log Phi_t`` with ``Phi_0 = 1`` on the outer grid."""
    arr = DriverArrays.of(driver)
    rho2, mu2, sigma2 = _coefficients(c, arr, "rho2", "mu2", "sigma2")
    with np.errstate(all="ignore"):
        expo = (
            trapezoid(rho2, arr.t)
            + left_sum(mu2 - 0.5 * sigma2**2, arr.de)
            + left_sum(sigma2, arr.db)
        )
    return finite_or_raise("fundamental exponent", expo, arr.t)


def fundamental_solution(c: LinearCoeffs, driver: DrivingTriple) -> CadlagPath:
    """
    ``x0 * Phi_t`` for the homogeneous part of ``c``.

    The inhomogeneous coefficients ``rho1``, ``mu1`` and ``sigma1`` are
    ignored. The result is positive whenever ``x0`` is.
    """
    expo = log_fundamental(c, driver)
    return CadlagPath(driver.grid, c.x0 * np.exp(expo), interp="step")


def _checked_inverse(expo: FloatArray, grid: FloatArray) -> FloatArray:
    low = np.nonzero(expo < _UNDERFLOW)[0]
    if low.size:
        msg = (
            f"fundamental solution underflows below 1e-300 at "
            f"t = {grid[int(low[0])]:g}"
        )
        raise ScalingError(msg)
    return np.exp(-expo)


def general_linear_solution(
        c: LinearCoeffs,
        driver: DrivingTriple,
) -> CadlagPath:
    """
    Variation-of-constants solution on the outer clock.

    Raises
    ------
    ScalingError
        If ``Phi`` underflows below ``1e-300``.
    """
    arr = DriverArrays.of(driver)
    expo = log_fundamental(c, driver)
    inv = _checked_inverse(expo, arr.t)
    rho1, mu1, sigma1, sigma2 = _coefficients(
        c, arr, "rho1", "mu1", "sigma1", "sigma2"
    )
    with np.errstate(all="ignore"):
        acc = (
            trapezoid(rho1 * inv, arr.t)
            + left_sum((mu1 - sigma2 * sigma1) * inv, arr.de)
            + left_sum(sigma1 * inv, arr.db)
        )
        x = np.exp(expo) * (c.x0 + acc)
    finite_or_raise("linear solution", x, arr.t)
    return CadlagPath(arr.t, x, interp="step")


# ---------------------------------------------------------------------- inner clock


def _inner_sum(
        values: FloatArray,
        driver: DrivingTriple,
        against: Literal["clock", "noise"],
) -> FloatArray:
    """
    ``int_0^{E_t} K_{D(s-)} ds`` (or ``dB_s``) for an outer integrand ``K``.
    """
    b = driver.inner_b
    if b is None:
        msg = "inner-clock forms need the inner Brownian path of the driver"
        raise HorizonExceededError(msg)
    outer = CadlagPath(driver.grid, values, interp="step")
    integrand = through_inverse(outer, b.grid, driver.pair)
    integrator = b if against == "noise" else CadlagPath(b.grid, b.grid, interp="linear")
    return compose_increment(ito_sum(integrand, integrator).path, driver.pair).values


def inner_clock_solution(
        c: LinearCoeffs,
        driver: DrivingTriple,
) -> CadlagPath:
    """
    The linear solution with every ``dE`` and ``dB_E`` integral rewritten on
    the inner clock, ``int_0^t K dE_s = int_0^{E_t} K_{D(s-)} ds``.

    Agrees with :func:`general_linear_solution` up to rounding when the
    inner grid of the driver contains the clock values.
    """
    arr = DriverArrays.of(driver)
    rho2, mu2, sigma2, rho1, mu1, sigma1 = _coefficients(
        c, arr, "rho2", "mu2", "sigma2", "rho1", "mu1", "sigma1"
    )
    expo = (
        trapezoid(rho2, arr.t)
        + _inner_sum(mu2 - 0.5 * sigma2**2, driver, "clock")
        + _inner_sum(sigma2, driver, "noise")
    )
    finite_or_raise("fundamental exponent", expo, arr.t)
    inv = _checked_inverse(expo, arr.t)
    acc = (
        trapezoid(rho1 * inv, arr.t)
        + _inner_sum((mu1 - sigma2 * sigma1) * inv, driver, "clock")
        + _inner_sum(sigma1 * inv, driver, "noise")
    )
    x = np.exp(expo) * (c.x0 + acc)
    return CadlagPath(arr.t, x, interp="step")
