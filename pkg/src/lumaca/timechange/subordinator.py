from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from lumaca.exceptions import ConfigurationError
from lumaca.timechange.paths import MonotonePath, uniform_grid
from lumaca.utils.random import CHUNK, Stream, path_generator, validate_seed

if TYPE_CHECKING:
    from collections.abc import Iterator

    from lumaca.typing import FloatArray

logger = logging.getLogger(__name__)

__all__ = [
    "StableSubordinatorConfig",
    "simulate_stable_subordinator",
    "stable_variates",
]

# hard cap on the number of grid cells a single path may be extended to
_MAX_CELLS = 50_000_000


@dataclass(frozen=True)
class StableSubordinatorConfig:
    """
    Recipe of a beta-stable subordinator path.

    Attributes
    ----------
    beta
        Stability index in ``(0, 1)``.
    step
        Grid spacing.
    horizon
        Length of the simulated time interval, at least ``step``.
    seed
        Unsigned 64-bit base seed.
    """

    beta: float
    step: float
    horizon: float
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 < self.beta < 1.0:
            msg = f"beta must lie in (0, 1), got {self.beta}"
            raise ConfigurationError(msg, key="beta")
        if not (math.isfinite(self.step) and self.step > 0):
            msg = f"step must be a positive real, got {self.step}"
            raise ConfigurationError(msg, key="step")
        if not (math.isfinite(self.horizon) and self.horizon >= self.step):
            msg = f"horizon must be >= step, got {self.horizon}"
            raise ConfigurationError(msg, key="horizon")
        validate_seed(self.seed)


def stable_variates(
        beta: float,
        u: FloatArray,
        w: FloatArray,
) -> FloatArray:
    """
    Chambers-Mallows-Stuck map for the standard one-sided stable law.

    Parameters
    ----------
    beta
        Index in ``(0, 1)``.
    u
        Uniform variates on ``(-pi/2, pi/2)``.
    w
        Standard exponential variates.

    Returns
    -------
    numpy.ndarray
        Positive variates ``S`` with ``E[exp(-s S)] = exp(-s**beta)``.
    """
    u0 = -0.5 * np.pi * (1.0 - abs(1.0 - beta)) / beta
    shifted = beta * (u - u0)
    with np.errstate(divide="ignore", over="ignore"):
        part1 = np.sin(shifted) / np.cos(u) ** (1.0 / beta)
        part2 = (np.cos(u - shifted) / w) ** ((1.0 - beta) / beta)
    return part1 * part2


def _increment_chunks(
        beta: float,
        rng: np.random.Generator,
) -> Iterator[FloatArray]:
    """Stable variates in blocks; every block draws its U then its W."""
    half_pi = 0.5 * np.pi
    while True:
        u = rng.uniform(-half_pi, half_pi, CHUNK)
        w = rng.standard_exponential(CHUNK)
        s = stable_variates(beta, u, w)
        # U on the open interval; the endpoints have probability zero
        yield np.where(np.isfinite(s) & (s > 0), s, np.finfo(np.float64).tiny)


def simulate_stable_subordinator(
        cfg: StableSubordinatorConfig,
        until: float | None = None,
        *,
        index: int = 0,
) -> MonotonePath:
    """
    Simulate a beta-stable subordinator on a uniform grid.

    Increments over one cell are ``step**(1/beta) * S`` with ``S`` standard
    one-sided stable, so ``E[exp(-s D_t)] = exp(-t s**beta)``.

    Parameters
    ----------
    cfg
        Index, grid spacing, horizon and seed.
    until
        If given, the path is extended past ``cfg.horizon`` until its last
        value exceeds ``until`` (needed to invert it on ``[0, until]``).
    index
        Path index inside an ensemble; each index is an independent stream.

    Returns
    -------
    MonotonePath
        Step-interpolated path starting at 0, strictly increasing almost
        surely.
    """
    rng = path_generator(cfg.seed, Stream.SUBORDINATOR, index)
    grid = uniform_grid(cfg.step, cfg.horizon)
    n_cells = grid.size - 1

    scale = cfg.step ** (1.0 / cfg.beta)
    chunks = _increment_chunks(cfg.beta, rng)
    blocks = [next(chunks) for _ in range(-(-n_cells // CHUNK))]
    increments = scale * np.concatenate(blocks)
    values = np.concatenate([[0.0], np.cumsum(increments[:n_cells])])

    if until is not None and values[-1] <= until:
        spare = increments[n_cells:]
        extra = [values[-1] + np.cumsum(spare)] if spare.size else []
        last = extra[-1][-1] if extra else values[-1]
        while last <= until:
            block = scale * next(chunks)
            extra.append(last + np.cumsum(block))
            last = extra[-1][-1]
            if n_cells + sum(e.size for e in extra) > _MAX_CELLS:
                msg = (
                    f"subordinator needs more than {_MAX_CELLS} cells to "
                    f"exceed {until}; increase step"
                )
                raise ConfigurationError(msg, key="step")
        tail = np.concatenate(extra)
        # keep the first point above `until` and nothing after it
        keep = int(np.searchsorted(tail, until, side="right")) + 1
        tail = tail[:keep]
        values = np.concatenate([values, tail])
        grid = cfg.step * np.arange(values.size, dtype=np.float64)
        if n_cells > 0:
            grid[: n_cells + 1] = uniform_grid(cfg.step, cfg.horizon)
        logger.debug(
            "subordinator path %d extended to %d cells", index, values.size - 1
        )

    return MonotonePath(grid, values, "step")
