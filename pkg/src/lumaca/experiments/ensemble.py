"""
Ensembles of clocks and drivers.

Path ``i`` of an ensemble with base seed ``s`` is always built from the
generators keyed by ``(s, stream, i)``. Targets that depend on the law of the
clock use an independent ensemble: exact marginals drawn on the ``TARGET``
stream for inverse-stable clocks, otherwise the paths with indices
``n_paths .. 2 n_paths - 1``.
"""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import numpy as np

from lumaca.exceptions import ConfigurationError
from lumaca.sde_engine.driver import make_driver
from lumaca.timechange.laws import sample_clock_exact
from lumaca.utils.parallel import map_batches

if TYPE_CHECKING:
    from collections.abc import Callable

    from lumaca.sde_engine.driver import DrivingTriple
    from lumaca.timechange.clocks import ClockSpec
    from lumaca.timechange.inverse import TimeChangePair
    from lumaca.typing import ArrayLike, FloatArray

logger = logging.getLogger(__name__)

__all__ = [
    "check_horizon",
    "clock_increments",
    "ensemble_map",
    "mean_clock_curve",
    "pair_map",
    "target_clock_sample",
]


def check_horizon(clock: ClockSpec, t: float) -> None:
    if not 0.0 <= t <= clock.horizon:
        msg = f"t = {t} is outside the clock horizon [0, {clock.horizon}]"
        raise ConfigurationError(msg, key="t")


def _rows(fn: Callable[[int], ArrayLike], n_paths: int, offset: int) -> FloatArray:
    def run(batch: range) -> FloatArray:
        return np.stack([np.atleast_1d(np.asarray(fn(offset + i), np.float64)) for i in batch])

    return np.concatenate(map_batches(run, n_paths), axis=0)


def pair_map(
        fn: Callable[[TimeChangePair], ArrayLike],
        clock: ClockSpec,
        n_paths: int,
        seed: int,
        *,
        offset: int = 0,
) -> FloatArray:
    """``fn`` applied to the clock pairs of paths ``offset .. offset + n_paths - 1``."""
    return _rows(lambda i: fn(clock.build(seed, i)), n_paths, offset)


def ensemble_map(
        fn: Callable[[DrivingTriple], ArrayLike],
        clock: ClockSpec,
        n_paths: int,
        seed: int,
        *,
        offset: int = 0,
) -> FloatArray:
    """
    ``fn`` applied to the drivers of an ensemble.

    Returns an array of shape ``(n_paths, k)`` for ``fn`` returning ``k``
    values, rows in path-index order.
    """
    logger.debug("ensemble of %d %s drivers", n_paths, clock.kind)

    def one(i: int) -> ArrayLike:
        return fn(make_driver(clock.build(seed, i), seed, i))

    return _rows(one, n_paths, offset)


def clock_increments(
        clock: ClockSpec,
        times: ArrayLike,
        n_paths: int,
        seed: int,
        *,
        offset: int = 0,
) -> FloatArray:
    """``E_t - E_0`` at ``times`` for the pairs of an ensemble."""
    t = np.atleast_1d(np.asarray(times, dtype=np.float64))

    def increments(pair: TimeChangePair) -> FloatArray:
        return pair.e(t) - pair.e.values[0]

    return pair_map(increments, clock, n_paths, seed, offset=offset)


def target_clock_sample(
        clock: ClockSpec,
        t: float,
        n_paths: int,
        seed: int,
) -> FloatArray:
    """Draws of ``E_t`` independent of the ensemble with the same seed."""
    check_horizon(clock, t)
    match clock.kind:
        case "identity":
            return np.full(n_paths, float(t))
        case "inverse_stable":
            assert clock.beta is not None
            if t == 0:
                return np.zeros(n_paths)
            return sample_clock_exact(clock.beta, [t], n_paths, seed)[:, 0]
        case "scaled":
            rates = [clock.draw_rate(seed, n_paths + i) for i in range(n_paths)]
            return np.asarray(rates) * t
    return clock_increments(clock, [t], n_paths, seed, offset=n_paths)[:, 0]


def mean_clock_curve(
        clock: ClockSpec,
        grid: ArrayLike,
        n_paths: int,
        seed: int,
) -> FloatArray:
    """Empirical ``E[E_s]`` on ``grid`` from the independent ensemble."""
    s = np.asarray(grid, dtype=np.float64)
    check_horizon(clock, float(s.max()))
    if clock.kind == "inverse_stable":
        assert clock.beta is not None
        out = np.zeros(s.size)
        pos = s > 0
        if pos.any():
            out[pos] = sample_clock_exact(clock.beta, s[pos], n_paths, seed).mean(axis=0)
        return out
    if clock.kind == "identity":
        return s.copy()
    if clock.kind == "scaled":
        rates = [clock.draw_rate(seed, n_paths + i) for i in range(n_paths)]
        return s * float(np.mean(rates))
    return clock_increments(clock, s, n_paths, seed, offset=n_paths).mean(axis=0)
