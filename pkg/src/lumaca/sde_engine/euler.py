from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING, Any

import numpy as np

from lumaca.exceptions import DivergenceError
from lumaca.path_calculus.cadlag import CadlagPath
from lumaca.utils.config import Config

if TYPE_CHECKING:
    from lumaca.sde_engine.driver import DriverBatch, DrivingTriple
    from lumaca.sde_engine.spec import SdeSpec
    from lumaca.typing import FloatArray, Scheme

logger = logging.getLogger(__name__)

__all__ = ["SolutionPath", "check_state", "euler_arrays", "solve_euler", "solve_euler_batch"]


@dataclass(frozen=True)
class SolutionPath:
    """A solution path together with the driver it was computed from."""

    path: CadlagPath
    driver: DrivingTriple
    scheme: Scheme
    step: float
    spec_name: str = "custom"

    @property
    def seed(self) -> int | None:
        return self.driver.seed

    def to_dict(self) -> dict[str, Any]:
        out = self.path.to_dict()
        out["metadata"] = {
            "scheme": self.scheme,
            "step": self.step,
            "seed": self.seed,
            "index": self.driver.index,
            "spec_name": self.spec_name,
        }
        return out


def check_state(x: FloatArray, step_index: int, time: float) -> None:
    """Raise ``DivergenceError`` if any entry of ``x`` is non-finite or huge."""
    bound = Config.divergence_bound()
    bad = ~np.isfinite(x) | (np.abs(x) > bound)
    if np.any(bad):
        msg = (
            f"state left the bound {bound:g} at step {step_index} "
            f"(t = {time:g}) on {int(np.sum(bad))} path(s)"
        )
        raise DivergenceError(msg, step_index=step_index, time=time)


def euler_arrays(
        spec: SdeSpec,
        t: FloatArray,
        e: FloatArray,
        b_of_e: FloatArray,
) -> FloatArray:
    """
    Explicit Euler-Maruyama on stacked driver rows.

    ``X_{n+1} = X_n + rho dt + mu dE + sigma d(B o E)`` with coefficients at
    ``(t_n, E_n, X_n)``. Where ``dE = 0`` the ``dE`` and ``d(B o E)`` terms
    are exactly zero and their coefficients never enter the sum.

    Parameters
    ----------
    t
        Outer grid, shape ``(n,)``.
    e, b_of_e
        Clock and time-changed noise, shape ``(m, n)``.

    Returns
    -------
    numpy.ndarray
        States of shape ``(m, n)``.
    """
    m, n = e.shape
    x = np.empty((m, n), dtype=np.float64)
    x[:, 0] = spec.x0
    dt = np.diff(t)
    de = np.diff(e, axis=1)
    db = np.diff(b_of_e, axis=1)

    with np.errstate(all="ignore"):
        for i in range(n - 1):
            xi, ui = x[:, i], e[:, i]
            inc = spec.drift(t[i], ui, xi) * dt[i] if spec.has_dt_term else 0.0
            moving = de[:, i] > 0
            if np.any(moving):
                clocked = spec.mu(t[i], ui, xi) * de[:, i] + spec.sigma(t[i], ui, xi) * db[:, i]
                inc = inc + np.where(moving, clocked, 0.0)
            nxt = xi + inc
            check_state(nxt, i + 1, float(t[i + 1]))
            x[:, i + 1] = nxt
    return x


def solve_euler(spec: SdeSpec, driver: DrivingTriple) -> SolutionPath:
    """
    Direct Euler-Maruyama solution on the outer grid of ``driver``.

    Raises
    ------
    DivergenceError
        If the state becomes non-finite or exceeds ``Config.divergence_bound()``.
    """
    driver.pair.require_double("solve_euler")
    t = driver.grid
    x = euler_arrays(
        spec,
        t,
        driver.pair.e.values[np.newaxis, :],
        driver.b_of_e.values[np.newaxis, :],
    )[0]
    return SolutionPath(
        path=CadlagPath(t, x, interp="step"),
        driver=driver,
        scheme="euler",
        step=float(np.max(np.diff(t))),
        spec_name=spec.name,
    )


def solve_euler_batch(spec: SdeSpec, batch: DriverBatch) -> FloatArray:
    """Euler states of every row of ``batch``, shape ``(len(batch), n)``."""
    logger.debug("euler on %d paths of %d points", len(batch), batch.t.size)
    return euler_arrays(spec, batch.t, batch.e, batch.b_of_e)
