from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
import polars as pl

from lumaca.exceptions import ConfigurationError
from lumaca.timechange.clocks import inverse_stable_pair
from lumaca.timechange.subordinator import stable_variates
from lumaca.utils.parallel import map_batches
from lumaca.utils.random import Stream, path_generator

if TYPE_CHECKING:
    from lumaca.timechange.paths import MonotonePath
    from lumaca.typing import FloatArray

logger = logging.getLogger(__name__)

__all__ = [
    "ScalingLaw",
    "estimate_scaling_law",
    "flat_fraction",
    "sample_clock",
    "sample_clock_exact",
]


def flat_fraction(e: MonotonePath) -> float:
    """Fraction of grid cells on which ``e`` does not move at all."""
    if len(e) < 2:
        return 1.0
    return float(np.mean(np.diff(e.values) == 0.0))


def sample_clock(
        beta: float,
        times: FloatArray,
        n_paths: int,
        step: float,
        seed: int,
) -> FloatArray:
    """
    Inverse-stable clock values ``E_t`` at ``times`` for ``n_paths`` paths.

    Returns an array of shape ``(n_paths, len(times))``, row ``i`` being
    path ``i`` of the ensemble.
    """
    times = np.asarray(times, dtype=np.float64)
    horizon = float(np.max(times))

    def run(batch: range) -> FloatArray:
        rows = np.empty((len(batch), times.size))
        for k, i in enumerate(batch):
            pair = inverse_stable_pair(beta, step, max(horizon, step), seed, i)
            rows[k] = pair.e(times)
        return rows

    return np.concatenate(map_batches(run, n_paths), axis=0)


@dataclass(frozen=True)
class ScalingLaw:
    """Fit of ``E[E_t] = c * t**slope`` on a log-log scale."""

    beta: float
    slope: float
    c: float
    n_paths: int
    times: tuple[float, ...]
    means: tuple[float, ...]
    std_errors: tuple[float, ...]

    def to_frame(self) -> pl.DataFrame:
        return pl.DataFrame(
            {
                "t": list(self.times),
                "mean": list(self.means),
                "std_error": list(self.std_errors),
                "fit": [self.c * t**self.slope for t in self.times],
            }
        )


def estimate_scaling_law(
        beta: float,
        times: FloatArray | list[float],
        n_paths: int,
        step: float,
        seed: int,
) -> ScalingLaw:
    """
    Estimate the power law of the mean inverse-stable clock.

    The constant ``c`` is taken from the fitted intercept, not from a
    formula.

    Parameters
    ----------
    beta
        Stability index.
    times
        Positive evaluation times, at least two distinct ones.
    n_paths
        Ensemble size.
    step
        Grid spacing of the simulated clocks.
    seed
        Base seed.
    """
    t = np.asarray(times, dtype=np.float64)
    if t.size < 2 or np.any(t <= 0):
        msg = "the scaling law needs at least two positive times"
        raise ConfigurationError(msg, key="times")
    if n_paths < 2:
        msg = f"n_paths must be at least 2, got {n_paths}"
        raise ConfigurationError(msg, key="n_paths")

    sample = sample_clock(beta, t, n_paths, step, seed)
    means = sample.mean(axis=0)
    se = sample.std(axis=0, ddof=1) / np.sqrt(n_paths)
    slope, intercept = np.polyfit(np.log(t), np.log(means), 1)
    logger.info(
        "scaling law beta=%s: slope %.4f, c %.4f over %d paths",
        beta, slope, np.exp(intercept), n_paths,
    )
    return ScalingLaw(
        beta=beta,
        slope=float(slope),
        c=float(np.exp(intercept)),
        n_paths=n_paths,
        times=tuple(t.tolist()),
        means=tuple(means.tolist()),
        std_errors=tuple(se.tolist()),
    )


def sample_clock_exact(
        beta: float,
        times: FloatArray | list[float],
        n_paths: int,
        seed: int,
        *,
        stream: Stream = Stream.TARGET,
) -> FloatArray:
    """
    Exact draws of the inverse-stable clock marginals.

    ``E_t`` has the law of ``(t / S)**beta`` with ``S`` standard one-sided
    stable. One ``S`` is drawn per path, so a row is exact at every single
    time but rows are not paths of ``E``; use it for marginal moments only.

    Returns an array of shape ``(n_paths, len(times))``.
    """
    if not 0.0 < beta < 1.0:
        msg = f"beta must lie in (0, 1), got {beta}"
        raise ConfigurationError(msg, key="beta")
    t = np.asarray(times, dtype=np.float64)

    def run(batch: range) -> FloatArray:
        s = np.empty(len(batch))
        for k, i in enumerate(batch):
            rng = path_generator(seed, stream, i)
            u = rng.uniform(-0.5 * np.pi, 0.5 * np.pi, 1)
            w = rng.standard_exponential(1)
            s[k] = stable_variates(beta, u, w)[0]
        return s

    s = np.concatenate(map_batches(run, n_paths))
    s = np.where(np.isfinite(s) & (s > 0), s, np.finfo(np.float64).tiny)
    return (t[np.newaxis, :] / s[:, np.newaxis]) ** beta
