from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Any

import numpy as np
import scipy.stats

from lumaca.exceptions import ConfigurationError
from lumaca.fracpde.problem import density_moments

if TYPE_CHECKING:
    from lumaca.fracpde.problem import DensityGrid
    from lumaca.fracpde.solver import FracPdeResult
    from lumaca.typing import ArrayLike, FloatArray

logger = logging.getLogger(__name__)

__all__ = [
    "DensityComparison",
    "compare_densities",
    "heat_kernel",
    "subdiffusion_variance_slope",
]


@dataclass(frozen=True)
class DensityComparison:
    """L1 distance and Kolmogorov-Smirnov statistic of two densities."""

    l1: float
    ks: float

    def to_dict(self) -> dict[str, Any]:
        return {"l1": self.l1, "ks": self.ks}


def _common_grid(a: DensityGrid, b: DensityGrid) -> FloatArray:
    width = min(a.width, b.width)
    low = min(a.y[0], b.y[0])
    high = max(a.y[-1], b.y[-1])
    n = int(math.floor((high - low) / width + 0.5)) + 1
    return low + width * np.arange(n)


def _rebin(grid: DensityGrid, y: FloatArray) -> FloatArray:
    return np.interp(y, grid.y, grid.masses, left=0.0, right=0.0)


def compare_densities(a: DensityGrid, b: DensityGrid) -> DensityComparison:
    """
    Distances between two densities.

    Densities on the same nodes are compared as they are; otherwise both
    are interpolated linearly onto the finer of the two spacings over the
    union of their ranges.
    """
    if a.y.shape == b.y.shape and np.allclose(a.y, b.y, rtol=0, atol=1e-12):
        y, pa, pb, width = a.y, a.masses, b.masses, a.width
    else:
        y = _common_grid(a, b)
        width = float(y[1] - y[0])
        pa, pb = _rebin(a, y), _rebin(b, y)
    l1 = float(np.sum(np.abs(pa - pb)) * width)
    ks = float(np.max(np.abs(np.cumsum(pa - pb) * width)))
    logger.debug("density comparison on %d nodes: l1 %.4g ks %.4g", y.size, l1, ks)
    return DensityComparison(l1=l1, ks=ks)


def heat_kernel(
        y: ArrayLike,
        t: float,
        x0: float = 0.0,
        sigma: float = 1.0,
) -> FloatArray:
    """Gaussian density of ``x0 + sigma B_t``."""
    if not t > 0:
        msg = f"the heat kernel needs t > 0, got {t}"
        raise ConfigurationError(msg, key="t")
    return scipy.stats.norm.pdf(y, loc=x0, scale=sigma * math.sqrt(t))


def subdiffusion_variance_slope(result: FracPdeResult) -> float:
    """
    Log-log slope of the variance growth over the positive snapshots.

    The variance of the mollified initial condition is subtracted first.
    """
    v0 = density_moments(result.initial)["variance"]
    points = [
        (s.time, density_moments(s)["variance"] - v0)
        for s in result.snapshots
        if s.time > 0
    ]
    points = [(t, v) for t, v in points if v > 0]
    if len(points) < 2:
        msg = "the variance slope needs at least two positive snapshots"
        raise ConfigurationError(msg, key="snapshot_times")
    t, v = np.array(points).T
    slope, _ = np.polyfit(np.log(t), np.log(v), 1)
    return float(slope)
