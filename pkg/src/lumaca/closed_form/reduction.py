from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import numpy as np

from lumaca.closed_form.quadrature import DriverArrays, finite_or_raise, left_sum
from lumaca.exceptions import ConfigurationError
from lumaca.path_calculus.cadlag import CadlagPath
from lumaca.sde_engine.euler import check_state

if TYPE_CHECKING:
    from lumaca.sde_engine.driver import DrivingTriple
    from lumaca.sde_engine.spec import SdeSpec
    from lumaca.typing import FloatArray

logger = logging.getLogger(__name__)

__all__ = ["integrating_factor", "reduce_and_solve"]


def integrating_factor(spec: SdeSpec, driver: DrivingTriple) -> FloatArray:
    """
    ``log U_t = int (sigma2**2 / 2 - mu2) dE - int sigma2 dB_E``.

    Raises
    ------
    ConfigurationError
        If ``spec`` does not declare multiplicative ``dE`` and ``dB_E``
        coefficients.
    """
    if spec.noise_factors is None:
        msg = (
            f"{spec.name!r}: the reduction method needs mu = mu2(t, u) x and "
            "sigma = sigma2(t, u) x (set noise_factors)"
        )
        raise ConfigurationError(msg, key="noise_factors")
    mu2_fn, sigma2_fn = spec.noise_factors
    arr = DriverArrays.of(driver)
    with np.errstate(all="ignore"):
        shape = arr.t.shape
        mu2 = np.broadcast_to(np.asarray(mu2_fn(arr.t, arr.u), np.float64), shape)
        sigma2 = np.broadcast_to(np.asarray(sigma2_fn(arr.t, arr.u), np.float64), shape)
        log_u = left_sum(0.5 * sigma2**2 - mu2, arr.de) - left_sum(sigma2, arr.db)
    return finite_or_raise("integrating factor", log_u, arr.t)


def reduce_and_solve(
        spec: SdeSpec,
        driver: DrivingTriple,
        ode_substeps: int = 1,
) -> CadlagPath:
    """
    Reduction to a path-by-path ODE through an integrating factor.

    With ``W = U X`` the SDE becomes ``dW/dt = U rho(t, E, W / U)``, solved
    by classical Runge-Kutta on every outer cell with ``U`` and ``E`` frozen
    at the left end of the cell.

    Parameters
    ----------
    spec
        SDE with multiplicative noise factors and any ``rho``.
    driver
        Double-bracket driver.
    ode_substeps
        Runge-Kutta steps per outer cell.

    Raises
    ------
    DivergenceError
        If the ODE state becomes non-finite or too large.
    """
    if ode_substeps < 1:
        msg = f"ode_substeps must be >= 1, got {ode_substeps}"
        raise ConfigurationError(msg, key="ode_substeps")
    driver.pair.require_double("reduce_and_solve")
    log_u = integrating_factor(spec, driver)
    factor = np.exp(log_u)
    t, e = driver.grid, driver.pair.e.values

    w = np.empty(t.size)
    w[0] = spec.x0
    if spec.rho is None:
        w[:] = spec.x0
    else:
        state = np.array([spec.x0])
        with np.errstate(all="ignore"):
            for i in range(t.size - 1):
                ui, fi = e[i], factor[i]

                def rhs(s: float, y: FloatArray, ui: float = ui, fi: float = fi) -> FloatArray:
                    return fi * spec.drift(s, ui, y / fi)

                h = (t[i + 1] - t[i]) / ode_substeps
                s = float(t[i])
                for _ in range(ode_substeps):
                    k1 = rhs(s, state)
                    k2 = rhs(s + 0.5 * h, state + 0.5 * h * k1)
                    k3 = rhs(s + 0.5 * h, state + 0.5 * h * k2)
                    k4 = rhs(s + h, state + h * k3)
                    state = state + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
                    s += h
                check_state(state, i + 1, float(t[i + 1]))
                w[i + 1] = state[0]
    x = w / factor
    logger.debug("reduced %r on %d points", spec.name, t.size)
    return CadlagPath(t, x, interp="step")
