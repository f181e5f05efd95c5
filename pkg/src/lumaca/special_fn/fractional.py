from __future__ import annotations

import math
from typing import TYPE_CHECKING

import numpy as np

from lumaca.exceptions import ConfigurationError
from lumaca.special_fn.gamma import gamma_fn

if TYPE_CHECKING:
    from lumaca.typing import FloatArray, ScalarFunction

__all__ = ["fractional_integral", "product_trapezoid_weights"]


def product_trapezoid_weights(
        nodes: FloatArray,
        beta: float,
        t: float,
) -> FloatArray:
    """
    Weights ``w`` with ``sum(w * f(nodes)) ~ int_0^t f(r) (t - r)**(beta-1) dr``.

    ``f`` is interpolated linearly on every cell and the kernel is integrated
    exactly against each linear piece.

    Parameters
    ----------
    nodes
        Increasing nodes from ``0`` to ``t``.
    beta
        Order in ``(0, 1]``.
    t
        Upper limit, equal to ``nodes[-1]``.
    """
    r = np.asarray(nodes, dtype=np.float64)
    h = np.diff(r)
    a = t - r[:-1]
    b = np.maximum(t - r[1:], 0.0)

    i0 = (a**beta - b**beta) / beta
    # moment of (r - r_j) against the kernel on the cell
    i1 = a * i0 - (a ** (beta + 1.0) - b ** (beta + 1.0)) / (beta + 1.0)

    w = np.zeros_like(r)
    w[:-1] += i0 - i1 / h
    w[1:] += i1 / h
    return w


def fractional_integral(
        f: ScalarFunction,
        beta: float,
        t: float,
        nodes: int = 256,
) -> float:
    """
    Riemann-Liouville fractional integral ``(J^beta f)(t)``.

    ``(J^beta f)(t) = 1/Gamma(beta) * int_0^t f(r) (t - r)**(beta - 1) dr``,
    computed by the product trapezoid rule on ``nodes`` uniform cells. For
    smooth ``f`` the error decays as ``nodes**-2``; ``beta = 1`` is the
    ordinary trapezoid rule.

    Parameters
    ----------
    f
        Function of one variable, evaluated on a numpy array of nodes.
    beta
        Order in ``(0, 1]``.
    t
        Evaluation point, ``t >= 0``.
    nodes
        Number of cells, at least 16.

    Examples
    --------
    >>> fractional_integral(lambda r: np.ones_like(r), 0.5, 1.0)  # doctest: +ELLIPSIS
    1.128379...
    """
    if not 0.0 < beta <= 1.0:
        msg = f"beta must lie in (0, 1], got {beta}"
        raise ConfigurationError(msg, key="beta")
    if nodes < 16:
        msg = f"nodes must be at least 16, got {nodes}"
        raise ConfigurationError(msg, key="nodes")
    if not (math.isfinite(t) and t >= 0.0):
        msg = f"t must be a finite non-negative real, got {t}"
        raise ConfigurationError(msg, key="t")
    if t == 0.0:
        return 0.0

    r = np.linspace(0.0, t, nodes + 1)
    values = np.broadcast_to(np.asarray(f(r), dtype=np.float64), r.shape)
    w = product_trapezoid_weights(r, beta, t)
    return float(np.dot(w, values) / gamma_fn(beta))
