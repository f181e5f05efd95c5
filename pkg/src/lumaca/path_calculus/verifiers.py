"""
Executable checks of the change-of-variable and Ito formulas on grids.

Every verifier builds both sides of an identity as paths on the outer grid
of a :class:`TimeChangePair` and reports their distance as a
:class:`Residual`. Inner-clock integrals run over ``[e(0), e(t)]``: on a grid
the inverse of a subordinator starts one inner cell above 0.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING, Any

import numpy as np

from lumaca.path_calculus.cadlag import CadlagPath, align, refine
from lumaca.path_calculus.integrals import (
    compose,
    compose_increment,
    covariation,
    ito_sum,
    quadratic_variation,
    through_inverse,
)

if TYPE_CHECKING:
    from lumaca.sde_engine.driver import DrivingTriple
    from lumaca.timechange.inverse import TimeChangePair
    from lumaca.typing import ScalarFunction

logger = logging.getLogger(__name__)

__all__ = [
    "CalculusRules",
    "ItoIntegrands",
    "Residual",
    "calculus_rules",
    "jump_correction",
    "verify_drift_reclocking",
    "verify_first_cov",
    "verify_product_rule",
    "verify_qv_composition",
    "verify_second_cov",
    "verify_tc_ito",
]


@dataclass(frozen=True)
class Residual:
    """
    Distance between the two sides of a pathwise identity.

    ``float(residual)`` is the sup-norm over the grid.
    """

    name: str
    sup: float
    rms: float
    lhs: CadlagPath
    rhs: CadlagPath

    def __float__(self) -> float:
        return self.sup

    @classmethod
    def between(cls, name: str, lhs: CadlagPath, rhs: CadlagPath) -> Residual:
        diff = lhs.values - rhs.values
        sup = float(np.max(np.abs(diff)))
        rms = float(np.sqrt(np.mean(diff**2)))
        logger.debug("%s residual: sup %.3e, rms %.3e", name, sup, rms)
        return cls(name=name, sup=sup, rms=rms, lhs=lhs, rhs=rhs)

    def to_dict(self) -> dict[str, Any]:
        return {"name": self.name, "sup": self.sup, "rms": self.rms}


_residual = Residual.between


def _outer(path: CadlagPath, pair: TimeChangePair) -> CadlagPath:
    return refine(path, pair.e.grid)


def _lebesgue(grid: np.ndarray) -> CadlagPath:
    return CadlagPath(grid, grid, interp="linear")


# ---------------------------------------------------------------------- change of variables


def verify_first_cov(
        h: CadlagPath,
        z: CadlagPath,
        pair: TimeChangePair,
) -> Residual:
    """
    First change-of-variable formula.

    Compares ``int_0^{T_t} H dZ`` with ``int_0^t H_{T(s-)} dZ_{T_s}``, both
    as forward sums. Vanishes under grid refinement when ``Z`` is
    synchronized with ``T``.

    Parameters
    ----------
    h, z
        Integrand and integrator on the inner clock.
    pair
        ``pair.e`` is the time-change ``T``.
    """
    h, z = align(h, z)
    lhs = compose_increment(ito_sum(h, z).path, pair)
    rhs = ito_sum(compose(h, pair.e), compose(z, pair.e)).path
    return _residual("first_cov", lhs, rhs)


def verify_second_cov(
        k: CadlagPath,
        z: CadlagPath,
        pair: TimeChangePair,
) -> Residual:
    """
    Second change-of-variable formula.

    Compares ``int_0^t K dZ_{T_s}`` with ``int_0^{T_t} K_{S(s-)} dZ_s``
    where ``S = pair.d`` is the inverse of ``T = pair.e``.

    Parameters
    ----------
    k
        Integrand on the outer clock.
    z
        Integrator on the inner clock.
    """
    k = _outer(k, pair)
    lhs = ito_sum(k, compose(z, pair.e)).path
    kd = through_inverse(k, z.grid, pair)
    rhs = compose_increment(ito_sum(kd, z).path, pair)
    return _residual("second_cov", lhs, rhs)


def verify_qv_composition(z: CadlagPath, pair: TimeChangePair) -> Residual:
    """Compares ``[Z o T, Z o T]`` with ``[Z, Z] o T``."""
    lhs = quadratic_variation(compose(z, pair.e))
    rhs = compose_increment(quadratic_variation(z), pair)
    return _residual("qv_composition", lhs, rhs)


# ---------------------------------------------------------------------- ito formula


@dataclass(frozen=True)
class ItoIntegrands:
    """
    Integrands of ``X = int A ds + int F dE + int G dZ_E`` on the outer grid.

    Constants are accepted and broadcast on the grid of the pair.
    """

    a: CadlagPath | float = 0.0
    f: CadlagPath | float = 0.0
    g: CadlagPath | float = 0.0

    def on(self, grid: np.ndarray) -> tuple[CadlagPath, CadlagPath, CadlagPath]:
        out = []
        for item in (self.a, self.f, self.g):
            if isinstance(item, CadlagPath):
                out.append(refine(item, grid))
            else:
                out.append(CadlagPath(grid, np.full(grid.shape, float(item))))
        return out[0], out[1], out[2]


def jump_correction(
        f: ScalarFunction,
        f1: ScalarFunction,
        x: CadlagPath,
) -> CadlagPath:
    """
    Running sum of ``f(x) - f(x-) - f'(x-) dx`` over the recorded jumps.

    Identically zero for paths without jump records.
    """
    running = np.zeros(len(x))
    for i, left in x.jumps.items():
        xi = float(x.values[i])
        running[i] = float(f(xi)) - float(f(left)) - float(f1(left)) * (xi - left)
    return CadlagPath(x.grid, np.cumsum(running), interp="step")


def verify_tc_ito(
        integrands: ItoIntegrands,
        z: CadlagPath,
        pair: TimeChangePair,
        f: ScalarFunction,
        f1: ScalarFunction,
        f2: ScalarFunction,
) -> Residual:
    """
    Time-changed Ito formula for a continuous integrator ``z``.

    ``f(X_t) - f(0)`` is compared with

    ``int f'(X) A ds + int^{E_t} f'(X_{D(s-)}) F_{D(s-)} ds
    + int^{E_t} f'(X_{D(s-)}) G_{D(s-)} dZ_s
    + 1/2 int^{E_t} f''(X_{D(s-)}) G_{D(s-)}**2 ds``

    plus the jump correction over recorded jumps of ``X``. The three
    inner-clock integrals are evaluated on the grid of ``z``.

    Raises
    ------
    UnsupportedBracketError
        If the time-change is not continuous.
    """
    pair.require_double("verify_tc_ito")
    grid = pair.e.grid
    a, ff, g = integrands.on(grid)
    ze = compose(z, pair.e)
    clock = CadlagPath(grid, pair.e.values - pair.e.values[0], interp="linear")

    x = (
        ito_sum(a, _lebesgue(grid)).path
        + ito_sum(ff, clock).path
        + ito_sum(g, ze).path
    )
    lhs = x.apply(f) - float(f(0.0))

    fx1 = x.apply(f1)
    fx2 = x.apply(f2)
    ds_outer = ito_sum(fx1 * a, _lebesgue(grid)).path

    inner_clock = _lebesgue(z.grid)
    drift = through_inverse(fx1 * ff, z.grid, pair)
    noise = through_inverse(fx1 * g, z.grid, pair)
    correction = through_inverse(fx2 * g * g * 0.5, z.grid, pair)
    inner = (
        ito_sum(drift, inner_clock).path
        + ito_sum(noise, z).path
        + ito_sum(correction, inner_clock).path
    )
    rhs = ds_outer + compose_increment(inner, pair) + jump_correction(f, f1, x)
    return _residual("tc_ito", lhs, rhs)


def verify_drift_reclocking(
        integrand: CadlagPath | float,
        pair: TimeChangePair,
) -> Residual:
    """
    Rewrites ``int_0^t phi ds`` as an integral on the inner clock.

    The right side is ``int_0^{E_t} phi_{D(s-)} dD_s`` with the jumps of
    ``D o E`` removed; at grid resolution a jump is the part of an increment
    of ``D o E`` that exceeds the cell length. This is a diagnostic: only the
    classical clock makes it exact on a grid.
    """
    grid = pair.e.grid
    phi = ItoIntegrands(a=integrand).on(grid)[0]
    lhs = ito_sum(phi, _lebesgue(grid)).path

    inner_grid = pair.d.grid[pair.d.grid <= pair.e.values[-1]]
    d_path = CadlagPath(inner_grid, pair.d.values[: inner_grid.size], interp="step")
    phi_d = through_inverse(phi, inner_grid, pair)
    reclocked = compose_increment(ito_sum(phi_d, d_path).path, pair)

    de = pair.d(pair.e.values)
    excess = np.maximum(np.diff(de) - np.diff(grid), 0.0)
    jumps = np.concatenate([[0.0], np.cumsum(phi.values[:-1] * excess)])
    rhs = reclocked - CadlagPath(grid, jumps, interp="step")
    return _residual("drift_reclocking", lhs, rhs)


# ---------------------------------------------------------------------- calculus rules


def verify_product_rule(y: CadlagPath, z: CadlagPath) -> Residual:
    """``Y Z - Y_0 Z_0`` against ``int Y- dZ + int Z- dY + [Y, Z]``."""
    y, z = align(y, z)
    lhs = y * z - float(y.values[0] * z.values[0])
    rhs = ito_sum(y, z).path + ito_sum(z, y).path + covariation(y, z)
    return _residual("product_rule", lhs, rhs)


@dataclass(frozen=True)
class CalculusRules:
    """
    Sup-norms of the discrete covariations that vanish for a continuous
    time-change, and of ``[B o E, B o E] - (E - E_0)``.
    """

    m_e: float
    m_be: float
    e_be: float
    be_be_minus_e: float

    def to_dict(self) -> dict[str, float]:
        return {
            "m_e": self.m_e,
            "m_be": self.m_be,
            "e_be": self.e_be,
            "be_be_minus_e": self.be_be_minus_e,
        }


def calculus_rules(driver: DrivingTriple) -> CalculusRules:
    grid = driver.pair.e.grid
    m = _lebesgue(grid)
    e = CadlagPath(grid, driver.pair.e.values - driver.pair.e.values[0], interp="linear")
    be = driver.b_of_e

    def sup(p: CadlagPath) -> float:
        return float(np.max(np.abs(p.values)))

    return CalculusRules(
        m_e=sup(covariation(m, e)),
        m_be=sup(covariation(m, be)),
        e_be=sup(covariation(e, be)),
        be_be_minus_e=sup(quadratic_variation(be) - e),
    )
