from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np

from lumaca.path_calculus.cadlag import CadlagPath, IntegralResult, align, same_grid

if TYPE_CHECKING:
    from lumaca.timechange.inverse import TimeChangePair
    from lumaca.timechange.paths import MonotonePath
    from lumaca.typing import FloatArray

__all__ = [
    "compose",
    "compose_increment",
    "covariation",
    "ito_sum",
    "quadratic_variation",
    "through_inverse",
]


def ito_sum(h: CadlagPath, z: CadlagPath) -> IntegralResult:
    """
    Forward (Ito) sum ``t -> sum_i h(t_i) (z(t_{i+1}) - z(t_i))``.

    The integrand is taken at the left end of every cell. At a recorded jump
    of ``z`` the integral jumps by ``h(left) * dz`` and the jump is recorded
    on the result.

    Parameters
    ----------
    h
        Integrand.
    z
        Integrator, on the same grid as ``h``.

    Raises
    ------
    GridMismatchError
        If ``h`` and ``z`` are sampled on different grids.

    Examples
    --------
    >>> g = np.linspace(0.0, 1.0, 5)
    >>> one = CadlagPath.constant(g, 1.0)
    >>> z = CadlagPath(g, g**2)
    >>> float(ito_sum(one, z).path.values[-1])
    1.0
    """
    same_grid(h, z)
    hv = h.values[:-1]
    running = np.concatenate([[0.0], np.cumsum(hv * np.diff(z.values))])

    jumps: dict[int, float] = {}
    for i, z_left in z.jumps.items():
        jumps[i] = running[i - 1] + hv[i - 1] * (z_left - z.values[i - 1])

    step = float(np.max(np.diff(z.grid))) if len(z) > 1 else 0.0
    return IntegralResult(
        path=CadlagPath(z.grid, running, jumps, "step"),
        scheme_step=step,
    )


def quadratic_variation(z: CadlagPath) -> CadlagPath:
    """Running sum of squared increments, starting at 0."""
    running = np.concatenate([[0.0], np.cumsum(np.diff(z.values) ** 2)])
    return CadlagPath(z.grid, running, None, "step")


def covariation(y: CadlagPath, z: CadlagPath) -> CadlagPath:
    """``[Y, Z]`` by polarization of quadratic variations."""
    y, z = align(y, z)
    plus = quadratic_variation(y + z)
    minus = quadratic_variation(y - z)
    return (plus - minus) * 0.25


def compose(z: CadlagPath, e: MonotonePath) -> CadlagPath:
    """
    ``(z o e)(t) = z(e(t))`` on ``e``'s grid.

    Jumps of a step-interpolated ``e`` become recorded jumps of the result,
    with left limit ``z(e(t-))``.

    Raises
    ------
    HorizonExceededError
        If ``e`` leaves the horizon of ``z``.
    """
    values = z(e.values)
    jumps: dict[int, float] = {}
    for i in e.jump_indices():
        left = float(z(e.values[i - 1]))
        if left != values[i]:
            jumps[int(i)] = left
    continuous = e.is_continuous and z.interp == "linear" and not z.jumps
    return CadlagPath(e.grid, values, jumps, "linear" if continuous else "step")


def compose_increment(inner: CadlagPath, pair: TimeChangePair) -> CadlagPath:
    """``inner(e(t)) - inner(e(0))`` on the outer grid of ``pair``."""
    out = compose(inner, pair.e)
    return out - float(out.values[0])


def through_inverse(
        outer: CadlagPath,
        inner_grid: FloatArray,
        pair: TimeChangePair,
) -> CadlagPath:
    """
    An outer integrand read on the inner clock, ``u -> outer(D(u))``.

    On a cell ``[u_k, u_k+1)`` of the inner grid ``D(s-)`` equals ``D(u_k)``,
    so forward sums of the result against inner integrators reproduce the
    outer forward sums cell by cell. Points past the outer horizon never
    enter a sum up to ``e(t)`` and are clamped.
    """
    du = pair.d(np.minimum(inner_grid, pair.d.horizon))
    du = np.minimum(du, outer.horizon)
    return CadlagPath(inner_grid, outer(du), interp="step")
