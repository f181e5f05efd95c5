from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any

import numpy as np

from lumaca.exceptions import ConfigurationError, DivergenceError

if TYPE_CHECKING:
    from lumaca.typing import ArrayLike, FloatArray, Provenance

logger = logging.getLogger(__name__)

__all__ = [
    "DEFAULT_THRESHOLD",
    "McEstimate",
    "MomentCheck",
    "jackknife_variance_se",
    "mc_estimate",
    "ratio_z",
]

DEFAULT_THRESHOLD = 3.0


def _sample(values: ArrayLike, minimum: int = 2) -> FloatArray:
    x = np.ravel(np.asarray(values, dtype=np.float64))
    if x.size < minimum:
        msg = f"an estimate needs at least {minimum} values, got {x.size}"
        raise ConfigurationError(msg, key="n_paths")
    if not np.all(np.isfinite(x)):
        i = int(np.nonzero(~np.isfinite(x))[0][0])
        msg = f"sample value {i} is not finite"
        raise DivergenceError(msg, step_index=i)
    return x


@dataclass(frozen=True)
class McEstimate:
    """Sample mean with its normal-approximation standard error."""

    mean: float
    std_error: float
    n: int
    seed: int | None
    variance: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "mean": self.mean,
            "std_error": self.std_error,
            "n": self.n,
            "seed": self.seed,
            "variance": self.variance,
        }


def mc_estimate(values: ArrayLike, seed: int | None = None) -> McEstimate:
    """
    Estimate the mean of ``values``.

    The values are reduced in index order, so the result does not depend on
    how the ensemble was batched.

    Examples
    --------
    >>> est = mc_estimate([1.0, 2.0, 3.0, 4.0])
    >>> est.mean, est.n
    (2.5, 4)
    """
    x = _sample(values)
    variance = float(np.var(x, ddof=1))
    return McEstimate(
        mean=float(np.mean(x)),
        std_error=math.sqrt(variance / x.size),
        n=int(x.size),
        seed=seed,
        variance=variance,
    )


def jackknife_variance_se(values: ArrayLike) -> float:
    """Delete-one jackknife standard error of the sample variance."""
    x = _sample(values, minimum=3)
    n = x.size
    x = x - x.mean()
    s1, s2 = x.sum(), np.dot(x, x)
    loo_mean = (s1 - x) / (n - 1)
    loo_var = (s2 - x**2 - (n - 1) * loo_mean**2) / (n - 2)
    return float(math.sqrt((n - 1) / n * np.sum((loo_var - loo_var.mean()) ** 2)))


def ratio_z(diff: float, scale: float, atol: float = 0.0) -> float:
    """``diff / scale``, 0 when ``|diff| <= atol`` whatever the scale."""
    if abs(diff) <= atol:
        return 0.0
    if scale > 0:
        return diff / scale
    return math.copysign(math.inf, diff)


@dataclass(frozen=True)
class MomentCheck:
    """
    Monte Carlo estimate of a moment against its target.

    ``z_score`` uses the standard error of the estimate only;
    ``combined_z`` also accounts for the Monte Carlo error of targets
    computed from an independent clock ensemble, and decides ``passed``.
    """

    name: str
    estimate: McEstimate
    target: float
    target_provenance: Provenance
    target_std_error: float = 0.0
    threshold: float = DEFAULT_THRESHOLD
    details: dict[str, Any] = field(default_factory=dict)

    @property
    def _atol(self) -> float:
        return 1e-12 * max(1.0, abs(self.target))

    @property
    def z_score(self) -> float:
        return ratio_z(self.estimate.mean - self.target, self.estimate.std_error, self._atol)

    @property
    def combined_z(self) -> float:
        scale = math.hypot(self.estimate.std_error, self.target_std_error)
        return ratio_z(self.estimate.mean - self.target, scale, self._atol)

    @property
    def passed(self) -> bool:
        return abs(self.combined_z) <= self.threshold

    def to_dict(self) -> dict[str, Any]:
        return {
            "check_name": self.name,
            "n": self.estimate.n,
            "seed": self.estimate.seed,
            "estimate": self.estimate.mean,
            "se": self.estimate.std_error,
            "target": self.target,
            "target_se": self.target_std_error,
            "provenance": self.target_provenance,
            "z": self.z_score,
            "combined_z": self.combined_z,
            "threshold": self.threshold,
            "passed": self.passed,
            "details": dict(sorted(self.details.items())),
        }
