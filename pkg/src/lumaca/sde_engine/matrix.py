from __future__ import annotations

import logging
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any

import numpy as np

from lumaca.exceptions import ConfigurationError, NearSingularityError, NumericalError
from lumaca.path_calculus.cadlag import CadlagPath
from lumaca.sde_engine.euler import check_state
from lumaca.utils.config import Config

if TYPE_CHECKING:
    from collections.abc import Sequence

    from lumaca.sde_engine.driver import DrivingTriple
    from lumaca.typing import FloatArray

logger = logging.getLogger(__name__)

__all__ = ["MatrixCoeffs", "MatrixSolution", "solve_linear_matrix"]

_MAX_DIM = 8

MatrixFn = Callable[[float, float], Any]


def _as_fn(value: Any, shape: tuple[int, ...], name: str) -> MatrixFn:
    if callable(value):
        return value
    arr = np.zeros(shape) if value is None else np.asarray(value, dtype=np.float64)
    if arr.shape != shape:
        msg = f"{name} must have shape {shape}, got {arr.shape}"
        raise ConfigurationError(msg, key=name)
    arr = arr.copy()
    return lambda t, u: arr


@dataclass(frozen=True)
class MatrixCoeffs:
    """
    Coefficients of the ``dim``-dimensional linear SDE

    ``dX = (rho1 + rho2 X) dt + (mu1 + mu2 X) dE + sum_j (sigma1_j + sigma2_j X) dB^j_E``

    with ``n_noise`` independent Brownian motions. Vectors have shape
    ``(dim,)`` and matrices ``(dim, dim)``; each entry is an array or a
    function of ``(t, u)`` returning one.
    """

    dim: int
    n_noise: int = 1
    rho1: Any = None
    rho2: Any = None
    mu1: Any = None
    mu2: Any = None
    sigma1: Sequence[Any] = field(default=())
    sigma2: Sequence[Any] = field(default=())
    x0: Any = None

    def __post_init__(self) -> None:
        d, n = self.dim, self.n_noise
        if not 1 <= d <= _MAX_DIM:
            msg = f"dim must lie in [1, {_MAX_DIM}], got {d}"
            raise ConfigurationError(msg, key="dim")
        if not 1 <= n <= _MAX_DIM:
            msg = f"n_noise must lie in [1, {_MAX_DIM}], got {n}"
            raise ConfigurationError(msg, key="n_noise")
        vec, mat = (d,), (d, d)
        object.__setattr__(self, "rho1", _as_fn(self.rho1, vec, "rho1"))
        object.__setattr__(self, "rho2", _as_fn(self.rho2, mat, "rho2"))
        object.__setattr__(self, "mu1", _as_fn(self.mu1, vec, "mu1"))
        object.__setattr__(self, "mu2", _as_fn(self.mu2, mat, "mu2"))
        for name, shape in (("sigma1", vec), ("sigma2", mat)):
            items = list(getattr(self, name)) or [None] * n
            if len(items) != n:
                msg = f"{name} needs one entry per noise ({n}), got {len(items)}"
                raise ConfigurationError(msg, key=name)
            object.__setattr__(
                self, name, tuple(_as_fn(v, shape, name) for v in items)
            )
        x0 = np.ones(d) if self.x0 is None else np.asarray(self.x0, np.float64)
        if x0.shape != vec:
            msg = f"x0 must have shape {vec}, got {x0.shape}"
            raise ConfigurationError(msg, key="x0")
        object.__setattr__(self, "x0", x0)


@dataclass(frozen=True)
class MatrixSolution:
    """
    Fundamental matrix ``Phi`` (``Phi_0 = I``) and state ``X`` on a grid.

    Attributes
    ----------
    phi
        Shape ``(n, dim, dim)``.
    states
        Shape ``(n, dim)``.
    """

    grid: FloatArray
    phi: FloatArray
    states: FloatArray
    max_condition: float

    def component(self, k: int) -> CadlagPath:
        return CadlagPath(self.grid, self.states[:, k], interp="step")

    def phi_entry(self, i: int, j: int) -> CadlagPath:
        return CadlagPath(self.grid, self.phi[:, i, j], interp="step")


def solve_linear_matrix(
        coeffs: MatrixCoeffs,
        drivers: Sequence[DrivingTriple],
) -> MatrixSolution:
    """
    Euler integration of the matrix fundamental solution and assembly of the
    general solution ``X = Phi (x0 + int Phi^-1 dV)`` with

    ``dV = rho1 dt + (mu1 - sum_j sigma2_j sigma1_j) dE + sum_j sigma1_j dB^j_E``.

    Parameters
    ----------
    coeffs
        Matrix coefficients.
    drivers
        One driver per noise, all on the same clock.

    Raises
    ------
    NearSingularityError
        If the condition number of ``Phi`` exceeds ``Config.condition_bound()``.
    """
    if len(drivers) != coeffs.n_noise:
        msg = f"expected {coeffs.n_noise} driver(s), got {len(drivers)}"
        raise ConfigurationError(msg, key="drivers")
    base = drivers[0]
    base.pair.require_double("solve_linear_matrix")
    t, e = base.grid, base.pair.e.values
    for drv in drivers[1:]:
        if not np.array_equal(drv.pair.e.values, e):
            msg = "all drivers of a matrix SDE must share one clock"
            raise ConfigurationError(msg, key="drivers")

    d, n = coeffs.dim, t.size
    bound = Config.condition_bound()
    dt = np.diff(t)
    de = np.diff(e)
    db = np.stack([np.diff(drv.b_of_e.values) for drv in drivers])

    phi = np.empty((n, d, d))
    phi[0] = np.eye(d)
    acc = np.zeros(d)
    states = np.empty((n, d))
    states[0] = coeffs.x0
    worst = 1.0

    for i in range(n - 1):
        ti, ui = float(t[i]), float(e[i])
        gen = coeffs.rho2(ti, ui) * dt[i] + coeffs.mu2(ti, ui) * de[i]
        vec = coeffs.rho1(ti, ui) * dt[i] + coeffs.mu1(ti, ui) * de[i]
        for j in range(coeffs.n_noise):
            s1 = np.asarray(coeffs.sigma1[j](ti, ui))
            s2 = np.asarray(coeffs.sigma2[j](ti, ui))
            gen = gen + s2 * db[j, i]
            vec = vec + s1 * db[j, i] - (s2 @ s1) * de[i]
        try:
            acc = acc + np.linalg.solve(phi[i], vec)
        except np.linalg.LinAlgError as err:
            msg = f"fundamental matrix not invertible at step {i}"
            raise NumericalError(msg) from err
        phi[i + 1] = phi[i] + gen @ phi[i]
        check_state(phi[i + 1], i + 1, float(t[i + 1]))

        cond = float(np.linalg.cond(phi[i + 1]))
        worst = max(worst, cond)
        if not cond <= bound:
            msg = (
                f"fundamental matrix condition number {cond:.3e} exceeds "
                f"{bound:g} at t = {t[i + 1]:g}"
            )
            raise NearSingularityError(msg, condition=cond, step_index=i + 1)
        states[i + 1] = phi[i + 1] @ (coeffs.x0 + acc)

    logger.debug("matrix solution of dim %d, worst condition %.3e", d, worst)
    return MatrixSolution(grid=t, phi=phi, states=states, max_condition=worst)
