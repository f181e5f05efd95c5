"""
One-parameter Mittag-Leffler function on the real line.

``E_beta(z) = sum_n z**n / Gamma(beta * n + 1)`` for ``0 < beta <= 1``.

Three evaluation branches are available:

* ``"exp"``: ``beta == 1``, where the function is ``exp(z)``.
* ``"series"``: the power series. Terms are summed with ``math.fsum`` when
  none exceeds one in magnitude; otherwise the sum is carried out with
  ``mpmath`` at a working precision large enough to absorb the cancellation
  between the largest terms.
* ``"asymptotic"``: for negative arguments,
  ``E_beta(-x) ~ sum_{k>=1} (-1)**(k+1) x**(-k) / Gamma(1 - beta*k)``,
  truncated before its smallest term.

For ``z < -5`` the asymptotic expansion is used when its error estimate meets
the requested tolerance; the series is the fallback. For ``|z| <= 5`` the
series is used unless it cannot converge within ``max_terms``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Literal

import mpmath
import numpy as np
import scipy.special

from lumaca.exceptions import (
    AccuracyError,
    ConfigurationError,
    SpecialFunctionDomainError,
)

logger = logging.getLogger(__name__)

__all__ = [
    "MittagLefflerParams",
    "mittag_leffler",
    "mittag_leffler_with_error",
]

Branch = Literal["exp", "series", "asymptotic"]

# |z| beyond which the supported domain ends
DOMAIN_LIMIT = 50.0

# argument magnitude at which negative z switches to the asymptotic expansion
SERIES_LIMIT = 5.0

_LOG_FLOAT_MAX = math.log(np.finfo(np.float64).max)


@dataclass(frozen=True)
class MittagLefflerParams:
    """
    Parameters of a Mittag-Leffler evaluation.

    Attributes
    ----------
    beta
        Order, ``0 < beta <= 1``.
    z
        Real evaluation point, ``|z| <= 50``.
    series_tol
        Relative truncation tolerance.
    max_terms
        Largest number of series (or asymptotic) terms evaluated.
    """

    beta: float
    z: float
    series_tol: float = 1e-12
    max_terms: int = 400

    def __post_init__(self) -> None:
        if not 0.0 < self.beta <= 1.0:
            msg = f"beta must lie in (0, 1], got {self.beta}"
            raise ConfigurationError(msg, key="beta")
        if not self.series_tol > 0:
            msg = f"series_tol must be positive, got {self.series_tol}"
            raise ConfigurationError(msg, key="series_tol")
        if self.max_terms < 1:
            msg = f"max_terms must be positive, got {self.max_terms}"
            raise ConfigurationError(msg, key="max_terms")
        if not math.isfinite(self.z) or abs(self.z) > DOMAIN_LIMIT:
            msg = (
                f"mittag_leffler is supported on |z| <= {DOMAIN_LIMIT:g}, "
                f"got z={self.z}"
            )
            raise SpecialFunctionDomainError(msg)


def mittag_leffler(p: MittagLefflerParams) -> float:
    """
    Evaluate ``E_beta(z)``.

    Raises
    ------
    SpecialFunctionDomainError
        If ``z`` is outside ``|z| <= 50`` or the value overflows.
    AccuracyError
        If no branch reaches ``series_tol`` within ``max_terms`` terms.
    """
    return mittag_leffler_with_error(p)[0]


def mittag_leffler_with_error(
        p: MittagLefflerParams,
) -> tuple[float, float, Branch]:
    """
    Evaluate ``E_beta(z)`` and report how.

    Returns
    -------
    tuple
        ``(value, achieved relative error bound, branch)``.
    """
    beta, z = float(p.beta), float(p.z)

    if beta == 1.0:
        if z > _LOG_FLOAT_MAX:
            msg = f"E_1({z}) overflows double precision"
            raise SpecialFunctionDomainError(msg)
        return math.exp(z), 0.0, "exp"
    if z == 0.0:
        return 1.0, 0.0, "series"

    asymptotic: tuple[float, float] | None = None
    if z < -SERIES_LIMIT:
        asymptotic = _asymptotic(beta, -z, p.max_terms)
        if asymptotic[1] <= p.series_tol:
            return asymptotic[0], asymptotic[1], "asymptotic"

    try:
        value, bound = _series(beta, z, p.series_tol, p.max_terms)
    except _SeriesExhausted as exc:
        if z < 0:
            if asymptotic is None:
                asymptotic = _asymptotic(beta, -z, p.max_terms)
            if asymptotic[1] <= p.series_tol:
                return asymptotic[0], asymptotic[1], "asymptotic"
            achieved = min(exc.achieved, asymptotic[1])
        else:
            achieved = exc.achieved
        msg = (
            f"E_{beta}({z}) did not reach tolerance {p.series_tol:g} "
            f"within {p.max_terms} terms"
        )
        raise AccuracyError(msg, achieved=achieved) from None
    return value, bound, "series"


# ----------------------------------------------------------------------


class _SeriesExhausted(Exception):
    def __init__(self, achieved: float) -> None:
        self.achieved = achieved
        super().__init__(achieved)


def _series(
        beta: float,
        z: float,
        tol: float,
        max_terms: int,
) -> tuple[float, float]:
    n = np.arange(max_terms, dtype=np.float64)
    log_mag = n * math.log(abs(z)) - scipy.special.gammaln(beta * n + 1.0)
    peak = int(np.argmax(log_mag))

    # E_beta(z) grows like exp(z**(1/beta)) / beta for z > 0
    with np.errstate(over="ignore"):
        growth = float(np.power(abs(z), 1.0 / beta)) - math.log(beta)
    if z > 0 and max(log_mag[peak], growth) > _LOG_FLOAT_MAX:
        msg = f"E_{beta}({z}) overflows double precision"
        raise SpecialFunctionDomainError(msg)

    if log_mag[peak] <= 0.0:
        return _series_float(z, log_mag, peak, tol)
    return _series_mp(beta, z, log_mag, peak, tol)


def _stop_index(
        log_mag: np.ndarray,
        peak: int,
        log_sum: float,
        tol: float,
) -> int | None:
    below = np.nonzero(log_mag[peak + 1:] <= math.log(tol) + log_sum)[0]
    if below.size == 0:
        return None
    return peak + 1 + int(below[0])


def _tail_bound(log_mag: np.ndarray, stop: int, abs_sum: float) -> float:
    last = math.exp(log_mag[stop])
    if stop + 1 < log_mag.size:
        ratio = math.exp(log_mag[stop + 1] - log_mag[stop])
    else:
        ratio = math.exp(log_mag[stop] - log_mag[stop - 1])
    if ratio >= 1.0:
        return math.inf
    return last / (1.0 - ratio) / abs_sum


def _series_float(
        z: float,
        log_mag: np.ndarray,
        peak: int,
        tol: float,
) -> tuple[float, float]:
    signs = np.where(
        (np.arange(log_mag.size) % 2 == 1) & (z < 0), -1.0, 1.0
    )
    terms = signs * np.exp(log_mag)
    # the partial sum up to the peak fixes the scale of the result
    running = math.fsum(terms[: peak + 1])
    scale = max(abs(running), np.finfo(np.float64).tiny)
    stop = _stop_index(log_mag, peak, math.log(scale), tol * 1e-2)
    if stop is None:
        raise _SeriesExhausted(math.exp(log_mag[-1]) / scale)
    value = math.fsum(terms[: stop + 1])
    return value, _tail_bound(log_mag, stop, max(abs(value), scale * 1e-300))


def _series_mp(
        beta: float,
        z: float,
        log_mag: np.ndarray,
        peak: int,
        tol: float,
) -> tuple[float, float]:
    digits_lost = log_mag[peak] / math.log(10.0)
    dps = int(math.ceil(digits_lost)) + 17 + int(math.ceil(-math.log10(tol)))
    with mpmath.workdps(dps):
        zz = mpmath.mpf(z)
        bb = mpmath.mpf(beta)
        total = mpmath.mpf(0)
        power = mpmath.mpf(1)
        n_max = log_mag.size
        for n in range(n_max):
            term = power * mpmath.rgamma(bb * n + 1)
            total += term
            if n > peak and total != 0:
                if abs(term) <= tol * 1e-2 * abs(total):
                    value = float(total)
                    bound = _tail_bound(log_mag, n, abs(value))
                    logger.debug(
                        "series E_%s(%s): %d terms at %d digits",
                        beta, z, n + 1, dps,
                    )
                    return value, bound
            power *= zz
        achieved = float(abs(term) / abs(total)) if total != 0 else math.inf
    raise _SeriesExhausted(achieved)


def _asymptotic(beta: float, x: float, max_terms: int) -> tuple[float, float]:
    """
    Expansion of ``E_beta(-x)`` for large ``x`` with its error estimate.

    The estimate is the first omitted nonzero term plus, for
    ``beta > 2/3``, the exponentially small contribution
    ``(2/beta) exp(x**(1/beta) cos(pi/beta))`` the expansion ignores.
    """
    k = np.arange(1, max_terms + 1, dtype=np.float64)
    arg = 1.0 - beta * k
    coeff = scipy.special.rgamma(arg)
    # 1/Gamma vanishes at the non-positive integers
    coeff[(arg <= 0) & (np.abs(arg - np.round(arg)) < 1e-9)] = 0.0
    log_x = math.log(x)
    with np.errstate(divide="ignore"):
        log_mag = np.log(np.abs(coeff)) - k * log_x

    # truncate just before the smallest nonzero term
    idx = np.nonzero(np.isfinite(log_mag))[0]
    if idx.size < 2:
        return 0.0, math.inf
    cut = int(np.argmin(log_mag[idx]))
    if cut == 0:
        return 0.0, math.inf
    used = idx[:cut]
    omitted = idx[cut]

    signs = np.where(k[used] % 2 == 1, 1.0, -1.0)
    value = math.fsum(signs * coeff[used] * np.exp(-k[used] * log_x))

    error = math.exp(log_mag[omitted])
    if beta > 2.0 / 3.0:
        error += (2.0 / beta) * math.exp(
            x ** (1.0 / beta) * math.cos(math.pi / beta)
        )
    if value <= 0.0:
        return value, math.inf
    return value, error / value
