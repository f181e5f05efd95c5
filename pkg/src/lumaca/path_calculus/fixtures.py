from __future__ import annotations

from typing import TYPE_CHECKING, Literal

import numpy as np

from lumaca.path_calculus.cadlag import CadlagPath
from lumaca.utils.random import Stream, chunked_draws, path_generator

if TYPE_CHECKING:
    from lumaca.typing import ArrayLike

__all__ = ["brownian_path", "indicator_path"]

Closed = Literal["left", "right", "both", "neither"]


def brownian_path(
        grid: ArrayLike,
        seed: int,
        index: int = 0,
        *,
        stream: Stream = Stream.BROWNIAN,
) -> CadlagPath:
    """
    Standard Brownian motion sampled on ``grid`` with ``B(0) = 0``.

    The path is stored with linear interpolation; it has no jumps.
    """
    g = np.asarray(grid, dtype=np.float64)
    rng = path_generator(seed, stream, index)
    normals = chunked_draws(rng, g.size - 1)
    values = np.concatenate([[0.0], np.cumsum(np.sqrt(np.diff(g)) * normals)])
    return CadlagPath(g, values, interp="linear")


def indicator_path(
        grid: ArrayLike,
        lower: float,
        upper: float = np.inf,
        closed: Closed = "left",
        *,
        scale: float = 1.0,
) -> CadlagPath:
    """
    ``scale * 1_I(t)`` for the interval ``I`` between ``lower`` and ``upper``.

    Examples
    --------
    ``indicator_path(g, 0.5, closed="neither")`` is ``1_{(1/2, inf)}``.
    """
    g = np.asarray(grid, dtype=np.float64)
    above = g >= lower if closed in ("left", "both") else g > lower
    below = g <= upper if closed in ("right", "both") else g < upper
    return CadlagPath(g, scale * (above & below).astype(np.float64), interp="step")
