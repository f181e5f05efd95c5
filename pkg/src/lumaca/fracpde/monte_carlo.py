from __future__ import annotations

import logging
from typing import TYPE_CHECKING, Literal

import numpy as np

from lumaca.exceptions import ConfigurationError, DualityUnsupportedError
from lumaca.fracpde.problem import DensityGrid
from lumaca.sde_engine.driver import make_driver
from lumaca.sde_engine.duality import solve_duality
from lumaca.sde_engine.euler import check_state
from lumaca.timechange.clocks import inverse_stable_pair
from lumaca.timechange.laws import sample_clock_exact
from lumaca.utils.parallel import map_batches
from lumaca.utils.random import Stream, chunked_draws, path_generator

if TYPE_CHECKING:
    from lumaca.sde_engine.spec import SdeSpec
    from lumaca.typing import FloatArray

logger = logging.getLogger(__name__)

__all__ = ["MIN_PATHS", "mc_density", "mc_samples"]

MIN_PATHS = 10_000

Method = Literal["exact", "duality"]


def _exact_batch(
        spec: SdeSpec,
        clock: FloatArray,
        t_final: float,
        seed: int,
        substeps: int,
        batch: range,
) -> FloatArray:
    e = clock[batch.start:batch.stop]
    h = e / substeps
    noise = np.empty((len(batch), substeps))
    for k, i in enumerate(batch):
        noise[k] = chunked_draws(path_generator(seed, Stream.BROWNIAN, i), substeps)

    x = np.full(len(batch), spec.x0)
    root_h = np.sqrt(h)
    with np.errstate(all="ignore"):
        for j in range(substeps):
            u = j * h
            x = (
                x
                + spec.mu(t_final, u, x) * h
                + spec.sigma(t_final, u, x) * root_h * noise[:, j]
            )
            check_state(x, j + 1, t_final)
    return x


def _duality_batch(
        spec: SdeSpec,
        beta: float,
        t_final: float,
        step: float,
        seed: int,
        batch: range,
) -> FloatArray:
    out = np.empty(len(batch))
    for k, i in enumerate(batch):
        pair = inverse_stable_pair(beta, step, t_final, seed, i)
        out[k] = solve_duality(spec, make_driver(pair, seed, i)).path.values[-1]
    return out


def mc_samples(
        spec: SdeSpec,
        beta: float,
        n_paths: int,
        t_final: float,
        seed: int,
        *,
        method: Method = "exact",
        substeps: int = 64,
        step: float = 1e-3,
) -> FloatArray:
    """
    Independent draws of ``X_{t_final}`` for ``dX = mu dE + sigma dB_E``.

    ``method="exact"`` draws ``E_{t_final}`` from its exact law and runs the
    classical SDE up to that time with ``substeps`` Euler steps (exact in
    law for constant coefficients). ``method="duality"`` simulates a full
    inverse-stable clock with grid ``step`` per path and composes the
    classical solution with it.

    Coefficients are called as ``(t_final, u, x)`` on the exact route.

    Raises
    ------
    DualityUnsupportedError
        If ``spec`` has a ``dt`` coefficient.
    """
    if spec.has_dt_term:
        msg = f"{spec.name!r}: the density of the fractional FPE needs rho = 0"
        raise DualityUnsupportedError(msg)
    if n_paths < MIN_PATHS:
        msg = f"n_paths must be at least {MIN_PATHS}, got {n_paths}"
        raise ConfigurationError(msg, key="n_paths")
    if substeps < 1:
        msg = f"substeps must be >= 1, got {substeps}"
        raise ConfigurationError(msg, key="substeps")

    if method == "exact":
        clock = sample_clock_exact(beta, [t_final], n_paths, seed)[:, 0]

        def run(batch: range) -> FloatArray:
            return _exact_batch(spec, clock, t_final, seed, substeps, batch)
    elif method == "duality":

        def run(batch: range) -> FloatArray:
            return _duality_batch(spec, beta, t_final, step, seed, batch)
    else:
        msg = f"unknown method {method!r}"
        raise ConfigurationError(msg, key="method")

    samples = np.concatenate(map_batches(run, n_paths))
    logger.info(
        "%d %s samples of %r at t=%g", n_paths, method, spec.name, t_final
    )
    return samples


def mc_density(
        spec: SdeSpec,
        beta: float,
        n_paths: int,
        t_final: float,
        bins: int | FloatArray,
        seed: int,
        *,
        y_domain: tuple[float, float] | None = None,
        method: Method = "exact",
        substeps: int = 64,
) -> DensityGrid:
    """
    Histogram density of ``X_{t_final}``.

    ``bins`` is a number of equal bins over ``y_domain`` (the sample range
    when ``None``) or an array of equally spaced edges.
    """
    samples = mc_samples(
        spec, beta, n_paths, t_final, seed, method=method, substeps=substeps
    )
    if np.ndim(bins) == 0:
        low, high = y_domain or (float(samples.min()), float(samples.max()))
        edges = np.linspace(low, high, int(bins) + 1)
    else:
        edges = np.asarray(bins, dtype=np.float64)
    return DensityGrid.from_samples(samples, edges, t_final)
