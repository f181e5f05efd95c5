"""
Duality between time-changed and classical SDEs.

If ``Y`` solves ``dY = mu(u, Y) du + sigma(u, Y) dB`` on the inner clock then
``X = Y o E`` solves ``dX = mu(E, X) dE + sigma(E, X) dB_E``; conversely
``X o D`` solves the classical equation. A ``dt`` term breaks the
correspondence.
"""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import numpy as np

from lumaca.exceptions import DualityUnsupportedError, HorizonExceededError
from lumaca.path_calculus.cadlag import CadlagPath
from lumaca.path_calculus.integrals import compose
from lumaca.path_calculus.verifiers import Residual
from lumaca.sde_engine.euler import SolutionPath, check_state

if TYPE_CHECKING:
    from lumaca.sde_engine.driver import DrivingTriple
    from lumaca.sde_engine.spec import SdeSpec
    from lumaca.typing import FloatArray

logger = logging.getLogger(__name__)

__all__ = ["classical_euler", "duality_residual", "solve_duality"]


def _require_no_dt(spec: SdeSpec, operation: str) -> None:
    if spec.has_dt_term:
        msg = (
            f"{operation}: {spec.name!r} has a dt coefficient; only SDEs "
            "driven by dE and dB_E transfer to the inner clock"
        )
        raise DualityUnsupportedError(msg)


def _inner(driver: DrivingTriple) -> tuple[CadlagPath, int]:
    b = driver.inner_b
    if b is None:
        msg = "the driver carries no inner Brownian path"
        raise HorizonExceededError(msg)
    start = int(np.argmin(np.abs(b.grid - driver.e0)))
    return b, start


def _outer_time(driver: DrivingTriple, u: FloatArray) -> FloatArray:
    d = driver.pair.d
    return np.minimum(d(np.minimum(u, d.horizon)), driver.pair.horizon)


def classical_euler(spec: SdeSpec, driver: DrivingTriple) -> CadlagPath:
    """
    Euler solution of the classical SDE on the inner grid of ``driver``.

    The solution is held at ``x0`` up to ``e(0)`` and integrated from there
    with the increments of the inner Brownian path. Coefficients receive the
    outer time ``D(u)`` as their ``t`` argument.
    """
    _require_no_dt(spec, "classical_euler")
    b, start = _inner(driver)
    u = b.grid
    t = _outer_time(driver, u)
    du = np.diff(u)
    db = np.diff(b.values)
    y = np.empty(u.size, dtype=np.float64)
    y[: start + 1] = spec.x0
    state = np.array([spec.x0])
    with np.errstate(all="ignore"):
        for k in range(start, u.size - 1):
            mu = spec.mu(t[k], u[k], state)
            sigma = spec.sigma(t[k], u[k], state)
            state = state + mu * du[k] + sigma * db[k]
            check_state(state, k + 1, float(u[k + 1]))
            y[k + 1] = state[0]
    return CadlagPath(u, y, interp="step")


def solve_duality(spec: SdeSpec, driver: DrivingTriple) -> SolutionPath:
    """
    ``X = Y o E`` with ``Y`` the classical Euler solution on the inner clock.

    Raises
    ------
    DualityUnsupportedError
        If ``spec`` has a ``dt`` coefficient.
    """
    _require_no_dt(spec, "solve_duality")
    y = classical_euler(spec, driver)
    x = compose(y, driver.pair.e)
    return SolutionPath(
        path=CadlagPath(x.grid, x.values, interp="step"),
        driver=driver,
        scheme="duality",
        step=float(np.max(np.diff(y.grid))),
        spec_name=spec.name,
    )


def duality_residual(
        spec: SdeSpec,
        solution: SolutionPath,
        driver: DrivingTriple,
) -> Residual:
    """
    Residual of the classical integral equation along ``X o D``.

    ``X o D`` is read on the inner grid over ``[e(0), E_T)``, where ``D`` stays
    within the outer horizon, and compared with ``x0`` plus the forward sums
    of ``mu du + sigma dB`` evaluated along it.
    """
    _require_no_dt(spec, "duality_residual")
    b, start = _inner(driver)
    top = float(driver.pair.e.values[-1])
    keep = np.nonzero(b.grid < top)[0]
    keep = keep[keep >= start]
    u = b.grid[keep]
    t = _outer_time(driver, u)
    x_of_d = solution.path(t)

    du = np.diff(u)
    db = np.diff(b.values[keep])
    with np.errstate(all="ignore"):
        mu = np.broadcast_to(spec.mu(t[:-1], u[:-1], x_of_d[:-1]), du.shape)
        sigma = np.broadcast_to(spec.sigma(t[:-1], u[:-1], x_of_d[:-1]), du.shape)
    running = spec.x0 + np.concatenate([[0.0], np.cumsum(mu * du + sigma * db)])

    grid = u - u[0]
    lhs = CadlagPath(grid, x_of_d, interp="step")
    rhs = CadlagPath(grid, running, interp="step")
    return Residual.between("duality", lhs, rhs)
