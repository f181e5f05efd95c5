"""
Moment formulas checked against simulated ensembles.

Every check simulates the solution along an ensemble of drivers and compares
its sample moment with a target. Targets that need the law of the clock are
computed from an independent clock ensemble (see
:mod:`lumaca.experiments.ensemble`), so the two Monte Carlo errors add in
quadrature in ``MomentCheck.combined_z``.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass
from typing import TYPE_CHECKING, Any, TypeAlias

import numpy as np
import scipy.integrate
import scipy.special

from lumaca.closed_form.coeffs import LinearCoeffs
from lumaca.closed_form.linear import fundamental_solution
from lumaca.closed_form.presets import ModelPreset, preset_solution
from lumaca.exceptions import ConfigurationError
from lumaca.experiments.ensemble import (
    check_horizon,
    ensemble_map,
    mean_clock_curve,
    pair_map,
    target_clock_sample,
)
from lumaca.experiments.estimates import (
    DEFAULT_THRESHOLD,
    McEstimate,
    MomentCheck,
    jackknife_variance_se,
    mc_estimate,
    ratio_z,
)
from lumaca.special_fn.fractional import fractional_integral
from lumaca.special_fn.gamma import gamma_fn
from lumaca.special_fn.mittag_leffler import MittagLefflerParams, mittag_leffler
from lumaca.timechange.clocks import ClockSpec

if TYPE_CHECKING:
    from collections.abc import Sequence

    from lumaca.sde_engine.driver import DrivingTriple
    from lumaca.timechange.inverse import TimeChangePair
    from lumaca.typing import ArrayLike, FloatArray

logger = logging.getLogger(__name__)

__all__ = [
    "MatrixVerdict",
    "check_matrix",
    "check_mean_homogeneous",
    "check_mittag_leffler",
    "check_ou_mean",
    "check_variance_homogeneous",
    "mean_lower_bound_flag",
    "ou_mean_ode",
]

OneVariable: TypeAlias = "float | Callable[[FloatArray], ArrayLike]"

# nodes of the running integrals of mu and sigma**2 over the clock range
_CLOCK_NODES = 4097


def _vectorized(f: OneVariable) -> Callable[[FloatArray], FloatArray]:
    if callable(f):
        return lambda x: np.broadcast_to(np.asarray(f(x), np.float64), np.shape(x))
    value = float(f)
    return lambda x: np.full(np.shape(x), value)


def _outer(f: OneVariable) -> Any:
    """``(t, u) -> f(t)`` or the constant itself."""
    if callable(f):
        return lambda t, u: f(t)
    return float(f)


def _inner(f: OneVariable) -> Any:
    """``(t, u) -> f(u)`` or the constant itself."""
    if callable(f):
        return lambda t, u: f(u)
    return float(f)


def _integral_to(f: OneVariable, upper: FloatArray) -> FloatArray:
    """``int_0^v f(u) du`` for every ``v`` in ``upper``."""
    upper = np.asarray(upper, dtype=np.float64)
    if not callable(f):
        return float(f) * upper
    top = float(np.max(upper, initial=0.0))
    if top == 0.0:
        return np.zeros_like(upper)
    grid = np.linspace(0.0, top, _CLOCK_NODES)
    running = scipy.integrate.cumulative_trapezoid(
        _vectorized(f)(grid), grid, initial=0.0
    )
    return np.interp(upper, grid, running)


def _rho_integral(rho: OneVariable, t: float) -> float:
    if not callable(rho):
        return float(rho) * t
    return float(scipy.integrate.quad(lambda s: float(rho(s)), 0.0, t)[0])


def _at(t: float) -> Callable[[Any], float]:
    return lambda path: float(path(t))


def _fixed(clock_sample: FloatArray) -> bool:
    # a deterministic clock makes the target exact
    return bool(np.ptp(clock_sample) == 0.0)


def mean_lower_bound_flag(
        estimate: McEstimate,
        bound: float,
        threshold: float = DEFAULT_THRESHOLD,
) -> bool:
    """
    Whether the estimated mean is compatible with ``E[X_t] >= bound``.

    The bound ``x0 exp(int rho)`` holds when ``mu >= 0``; this is a
    one-sided flag, not a test.
    """
    return estimate.mean + threshold * estimate.std_error >= bound


def _homogeneous_coeffs(
        rho: OneVariable,
        mu: OneVariable,
        sigma: OneVariable,
        x0: float,
) -> LinearCoeffs:
    return LinearCoeffs(
        rho2=_outer(rho), mu2=_inner(mu), sigma2=_inner(sigma), x0=x0
    )


def check_mean_homogeneous(
        rho: OneVariable,
        mu: OneVariable,
        sigma: OneVariable,
        clock: ClockSpec,
        t: float,
        n_paths: int,
        seed: int,
        *,
        x0: float = 1.0,
        threshold: float = DEFAULT_THRESHOLD,
) -> MomentCheck:
    """
    Mean of ``dX = rho(t) X dt + mu(E) X dE + sigma(E) X dB_E``.

    The target is ``x0 exp(int_0^t rho) E[exp(int_0^{E_t} mu)]``; the
    ``sigma`` part is a mean-one martingale given the clock. For an
    inverse-stable clock and constant ``mu < 0`` the Mittag-Leffler value of
    the same mean is added to ``details``.

    Parameters
    ----------
    rho
        Function of outer time, or a constant.
    mu, sigma
        Functions of the clock value, or constants.
    """
    check_horizon(clock, t)
    coeffs = _homogeneous_coeffs(rho, mu, sigma, x0)
    at_t = _at(t)
    values = ensemble_map(
        lambda d: at_t(fundamental_solution(coeffs, d)), clock, n_paths, seed
    )[:, 0]
    estimate = mc_estimate(values, seed)

    scale = x0 * math.exp(_rho_integral(rho, t))
    v = target_clock_sample(clock, t, n_paths, seed)
    weights = scale * np.exp(_integral_to(mu, v))
    target = float(np.mean(weights))
    target_se = (
        0.0 if _fixed(v) else float(np.std(weights, ddof=1) / math.sqrt(n_paths))
    )

    details: dict[str, Any] = {}
    if clock.kind == "inverse_stable" and not callable(mu) and mu < 0:
        assert clock.beta is not None
        z = float(mu) * t**clock.beta
        ml = scale * mittag_leffler(MittagLefflerParams(clock.beta, z))
        details["mittag_leffler_target"] = ml
        details["mittag_leffler_relative_gap"] = abs(ml - target) / abs(ml)

    grid = np.linspace(0.0, float(np.max(v, initial=0.0)), 257)
    if np.all(_vectorized(mu)(grid) >= 0):
        details["lower_bound"] = scale
        details["lower_bound_holds"] = mean_lower_bound_flag(estimate, scale, threshold)

    provenance = "closed_form" if clock.kind == "identity" else "quadrature"
    check = MomentCheck(
        name="mean_homogeneous",
        estimate=estimate,
        target=target,
        target_provenance=provenance,
        target_std_error=target_se,
        threshold=threshold,
        details=details,
    )
    logger.info("%s: z = %.3f", check.name, check.combined_z)
    return check


def check_mittag_leffler(
        lam: float,
        beta: float,
        t: float,
        n_paths: int,
        seed: int,
        *,
        rho: OneVariable = 0.0,
        sigma: float = 0.3,
        x0: float = 1.0,
        step: float = 1e-3,
        threshold: float = DEFAULT_THRESHOLD,
) -> MomentCheck:
    """
    Mean of ``dX = rho X dt - lam X dE + sigma X dB_E`` on an inverse-stable
    clock against ``x0 exp(int rho) E_beta(-lam t**beta)``.

    The reported estimate is the Laplace form ``x0 exp(int rho)
    exp(-lam E_t)`` averaged over the simulated clocks; the mean of the
    simulated solution itself is in ``details`` with its own z-score.
    """
    if not lam > 0:
        msg = f"lam must be positive, got {lam}"
        raise ConfigurationError(msg, key="lam")
    clock = ClockSpec("inverse_stable", step=step, horizon=max(t, step), beta=beta)
    coeffs = _homogeneous_coeffs(rho, -lam, sigma, x0)
    at_t = _at(t)

    def row(d: DrivingTriple) -> list[float]:
        clock_t = float(d.pair.e(t)) - d.e0
        return [at_t(fundamental_solution(coeffs, d)), clock_t]

    sample = ensemble_map(row, clock, n_paths, seed)
    scale = x0 * math.exp(_rho_integral(rho, t))
    laplace = mc_estimate(scale * np.exp(-lam * sample[:, 1]), seed)
    full = mc_estimate(sample[:, 0], seed)

    target = scale * mittag_leffler(MittagLefflerParams(beta, -lam * t**beta))
    details: dict[str, Any] = {
        "full_solution_mean": full.mean,
        "full_solution_se": full.std_error,
        "full_solution_z": ratio_z(full.mean - target, full.std_error),
    }
    if beta == 0.5:
        details["erfc_identity"] = scale * float(
            scipy.special.erfcx(lam * math.sqrt(t))
        )
    check = MomentCheck(
        name="mittag_leffler_mean",
        estimate=laplace,
        target=target,
        target_provenance="mittag_leffler",
        threshold=threshold,
        details=details,
    )
    logger.info(
        "%s beta=%s: z = %.3f (full solution %.3f)",
        check.name, beta, check.z_score, details["full_solution_z"],
    )
    return check


def ou_mean_ode(
        alpha: float,
        mu: float,
        x0: float,
        grid: ArrayLike,
        mean_clock: ArrayLike,
) -> float:
    """
    Mean of the time-changed OU process from ``m' = -alpha m + mu dE[E_t]/dt``
    driven by an empirical mean clock on ``grid``.
    """
    s = np.asarray(grid, dtype=np.float64)
    c = np.asarray(mean_clock, dtype=np.float64)
    m = float(x0)
    for h, dc in zip(np.diff(s), np.diff(c)):
        m = math.exp(-alpha * h) * m + mu * math.exp(-0.5 * alpha * h) * dc
    return m


def _growth_integral(alpha: float, t: float) -> Callable[[TimeChangePair], float]:
    def integral(pair: TimeChangePair) -> float:
        grid = pair.e.grid
        keep = grid <= t + 1e-12
        s, e = grid[keep], pair.e.values[keep]
        return float(np.sum(np.exp(alpha * s[:-1]) * np.diff(e)))

    return integral


def check_ou_mean(
        alpha: float,
        mu: float,
        sigma: float,
        clock: ClockSpec,
        t: float,
        n_paths: int,
        seed: int,
        *,
        x0: float = 1.0,
        threshold: float = DEFAULT_THRESHOLD,
) -> MomentCheck:
    """
    Mean of ``dX = -alpha X dt + mu dE + sigma dB_E`` against
    ``exp(-alpha t) (x0 + mu E[int_0^t exp(alpha s) dE_s])``.

    Scaled clocks ``E_t = R t`` (the identity included) have the closed form
    ``x0 exp(-alpha t) + mu E[R] / alpha (1 - exp(-alpha t))``; other clocks
    use the Stieltjes sums of an independent clock ensemble. The linear ODE
    route, and for inverse-stable clocks the fractional-integral route, are
    reported in ``details``.
    """
    check_horizon(clock, t)
    preset = ModelPreset(
        "ornstein_uhlenbeck", {"alpha": alpha, "mu": mu, "sigma": sigma, "x0": x0}
    )
    at_t = _at(t)
    values = ensemble_map(
        lambda d: at_t(preset_solution(preset, d)), clock, n_paths, seed
    )[:, 0]
    estimate = mc_estimate(values, seed)
    decay = math.exp(-alpha * t)

    details: dict[str, Any] = {}
    if clock.kind in ("identity", "scaled"):
        target = x0 * decay + mu * clock.mean_rate / alpha * (1.0 - decay)
        target_se = 0.0
        provenance = "closed_form"
    else:
        sums = pair_map(
            _growth_integral(alpha, t), clock, n_paths, seed, offset=n_paths
        )[:, 0]
        target = decay * (x0 + mu * float(np.mean(sums)))
        target_se = decay * abs(mu) * float(np.std(sums, ddof=1)) / math.sqrt(n_paths)
        provenance = "quadrature"

    grid = np.linspace(0.0, t, 257)
    details["ode_target"] = ou_mean_ode(
        alpha, mu, x0, grid, mean_clock_curve(clock, grid, n_paths, seed)
    )

    if clock.kind == "inverse_stable" and t > 0:
        assert clock.beta is not None
        beta = clock.beta
        clock_t = target_clock_sample(clock, t, n_paths, seed)
        c_hat = float(np.mean(clock_t)) / t**beta
        c_se = float(np.std(clock_t, ddof=1)) / math.sqrt(n_paths) / t**beta
        j = fractional_integral(lambda s: np.exp(alpha * (t - s)), beta, t)
        factor = decay * mu * beta * gamma_fn(beta) * j
        frac = decay * x0 + factor * c_hat
        frac_se = abs(factor) * c_se
        details["fractional_target"] = frac
        details["fractional_gap_z"] = ratio_z(
            frac - target, math.hypot(frac_se, target_se)
        )

    check = MomentCheck(
        name="ou_mean",
        estimate=estimate,
        target=target,
        target_provenance=provenance,
        target_std_error=target_se,
        threshold=threshold,
        details=details,
    )
    logger.info("%s on %s clock: z = %.3f", check.name, clock.kind, check.combined_z)
    return check


def check_variance_homogeneous(
        rho: OneVariable,
        mu: OneVariable,
        sigma: OneVariable,
        clock: ClockSpec,
        t: float,
        n_paths: int,
        seed: int,
        *,
        x0: float = 1.0,
        threshold: float = DEFAULT_THRESHOLD,
) -> MomentCheck:
    """
    Variance of the homogeneous linear solution against
    ``x0**2 exp(2 int rho) (E[exp(2 M + S)] - E[exp(M)]**2)`` with
    ``M = int_0^{E_t} mu`` and ``S = int_0^{E_t} sigma**2``.

    The estimate is the sample variance with a jackknife standard error; the
    target error comes from the delta method.
    """
    check_horizon(clock, t)
    coeffs = _homogeneous_coeffs(rho, mu, sigma, x0)
    at_t = _at(t)
    values = ensemble_map(
        lambda d: at_t(fundamental_solution(coeffs, d)), clock, n_paths, seed
    )[:, 0]
    sample_var = float(np.var(values, ddof=1))
    se = jackknife_variance_se(values)
    estimate = McEstimate(
        mean=sample_var,
        std_error=se,
        n=int(values.size),
        seed=seed,
        variance=se**2 * values.size,
    )

    scale = x0**2 * math.exp(2.0 * _rho_integral(rho, t))
    v = target_clock_sample(clock, t, n_paths, seed)
    m = _integral_to(mu, v)
    s2 = _integral_to(lambda u: _vectorized(sigma)(u) ** 2, v)
    a = np.exp(2.0 * m + s2)
    b = np.exp(m)
    target = scale * (float(np.mean(a)) - float(np.mean(b)) ** 2)
    grad = np.array([1.0, -2.0 * float(np.mean(b))])
    cov = np.cov(np.vstack([a, b]))
    target_se = (
        0.0
        if _fixed(v)
        else scale * math.sqrt(max(float(grad @ cov @ grad), 0.0) / n_paths)
    )

    check = MomentCheck(
        name="variance_homogeneous",
        estimate=estimate,
        target=target,
        target_provenance="closed_form" if clock.kind == "identity" else "quadrature",
        target_std_error=target_se,
        threshold=threshold,
    )
    logger.info("%s: z = %.3f", check.name, check.combined_z)
    return check


@dataclass(frozen=True)
class MatrixVerdict:
    """Outcome of a set of checks under the multiple-testing allowance."""

    n_checks: int
    failed: tuple[str, ...]
    allowed: int

    @property
    def n_failed(self) -> int:
        return len(self.failed)

    @property
    def passed(self) -> bool:
        return self.n_failed <= self.allowed

    def to_dict(self) -> dict[str, Any]:
        return {
            "n_checks": self.n_checks,
            "n_failed": self.n_failed,
            "allowed": self.allowed,
            "failed": list(self.failed),
            "passed": self.passed,
        }


def check_matrix(
        checks: Sequence[MomentCheck],
        threshold: float = DEFAULT_THRESHOLD,
        allowance: float = 1.0 / 20.0,
) -> MatrixVerdict:
    """
    Apply ``threshold`` to every check, tolerating ``allowance`` of them
    (rounded down) failing.
    """
    if not 0.0 <= allowance < 1.0:
        msg = f"allowance must lie in [0, 1), got {allowance}"
        raise ConfigurationError(msg, key="allowance")
    failed = tuple(c.name for c in checks if not abs(c.combined_z) <= threshold)
    return MatrixVerdict(
        n_checks=len(checks),
        failed=failed,
        allowed=math.floor(len(checks) * allowance + 1e-9),
    )
