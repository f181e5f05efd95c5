from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any

import numpy as np
import polars as pl

from lumaca.exceptions import ConfigurationError

if TYPE_CHECKING:
    from lumaca.typing import FloatArray, ScalarFunction

logger = logging.getLogger(__name__)

__all__ = ["DensityGrid", "FracPdeProblem", "density_moments"]

_MIN_POINTS = 64

# half-width of the automatic domain in units of sigma_max * sqrt(t_final)
_WIDTH_SIGMAS = 8.0


def state_values(fn: ScalarFunction, y: FloatArray) -> FloatArray:
    with np.errstate(all="ignore"):
        values = np.asarray(fn(y), dtype=np.float64)
    return np.broadcast_to(values, y.shape).copy()


@dataclass(frozen=True)
class FracPdeProblem:
    """
    ``D^beta p = -d/dy (mu p) + 1/2 d2/dy2 (sigma**2 p)`` started from a
    point mass at ``x_init``.

    Attributes
    ----------
    beta
        Order of the Caputo derivative, in ``(0, 1)``.
    mu_fn, sigma_fn
        Functions of the state ``y`` evaluated on arrays.
    y_domain
        ``(y_min, y_max)``; ``None`` selects ``x_init +- 8 sigma_max
        sqrt(t_final)`` plus the drift displacement. A domain narrower than
        that is widened.
    snapshot_times
        Times at which densities are returned, rounded to the time grid.
        Empty means ``(t_final,)``.
    """

    beta: float
    mu_fn: ScalarFunction
    sigma_fn: ScalarFunction
    x_init: float = 0.0
    t_final: float = 1.0
    nt: int = 256
    ny: int = 256
    y_domain: tuple[float, float] | None = None
    snapshot_times: tuple[float, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        if not 0.0 < self.beta < 1.0:
            msg = f"beta must lie in (0, 1), got {self.beta}"
            raise ConfigurationError(msg, key="beta")
        if not (math.isfinite(self.t_final) and self.t_final > 0):
            msg = f"t_final must be positive, got {self.t_final}"
            raise ConfigurationError(msg, key="t_final")
        if not math.isfinite(self.x_init):
            msg = f"x_init must be finite, got {self.x_init}"
            raise ConfigurationError(msg, key="x_init")
        for key in ("nt", "ny"):
            if getattr(self, key) < _MIN_POINTS:
                msg = f"{key} must be at least {_MIN_POINTS}, got {getattr(self, key)}"
                raise ConfigurationError(msg, key=key)
        if self.y_domain is not None:
            low, high = self.y_domain
            if not low < self.x_init < high:
                msg = (
                    f"x_init = {self.x_init} must lie inside the domain "
                    f"({low}, {high})"
                )
                raise ConfigurationError(msg, key="y_domain")
        for t in self.snapshot_times:
            if not 0.0 <= t <= self.t_final:
                msg = f"snapshot time {t} is outside [0, {self.t_final}]"
                raise ConfigurationError(msg, key="snapshot_times")

    @property
    def dt(self) -> float:
        return self.t_final / self.nt

    @property
    def times(self) -> tuple[float, ...]:
        return self.snapshot_times or (self.t_final,)

    def _required_half_width(self, low: float, high: float) -> float:
        probe = np.linspace(low, high, 257)
        sigma_max = float(np.max(np.abs(state_values(self.sigma_fn, probe))))
        mu_max = float(np.max(np.abs(state_values(self.mu_fn, probe))))
        return (
            _WIDTH_SIGMAS * sigma_max * math.sqrt(self.t_final)
            + mu_max * self.t_final
        )

    def resolve_domain(self) -> tuple[tuple[float, float], bool]:
        """
        The domain actually used and whether it was widened.

        The heuristic half-width is evaluated twice, the second time on the
        domain the first pass produced.
        """
        x = self.x_init
        half = _WIDTH_SIGMAS * math.sqrt(self.t_final)
        for _ in range(2):
            half = max(half, self._required_half_width(x - half, x + half))
        if not math.isfinite(half) or half <= 0:
            msg = "sigma_fn must be finite and positive on the domain"
            raise ConfigurationError(msg, key="sigma_fn")

        if self.y_domain is None:
            return (x - half, x + half), True
        low, high = self.y_domain
        new = (min(low, x - half), max(high, x + half))
        widened = new != (low, high)
        if widened:
            logger.info(
                "domain (%g, %g) widened to (%g, %g)", low, high, *new
            )
        return new, widened

    def to_dict(self) -> dict[str, Any]:
        return {
            "beta": self.beta,
            "x_init": self.x_init,
            "t_final": self.t_final,
            "nt": self.nt,
            "ny": self.ny,
            "y_domain": list(self.y_domain) if self.y_domain else None,
            "snapshot_times": list(self.times),
        }


@dataclass(frozen=True, eq=False)
class DensityGrid:
    """
    A density on equally spaced nodes.

    ``masses`` holds density values at the nodes, so ``masses.sum() * width``
    is the total mass.
    """

    y: FloatArray
    masses: FloatArray
    time: float

    def __post_init__(self) -> None:
        y = np.asarray(self.y, dtype=np.float64)
        m = np.asarray(self.masses, dtype=np.float64)
        if y.ndim != 1 or y.shape != m.shape or y.size < 2:
            msg = "nodes and masses must be 1-d arrays of equal length >= 2"
            raise ConfigurationError(msg, key="masses")
        if np.any(np.diff(y) <= 0):
            msg = "density nodes must be strictly increasing"
            raise ConfigurationError(msg, key="y")
        if np.any(m < 0) or not np.all(np.isfinite(m)):
            msg = "densities must be finite and nonnegative"
            raise ConfigurationError(msg, key="masses")
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "masses", m)

    @classmethod
    def from_samples(
            cls,
            samples: FloatArray,
            edges: FloatArray,
            time: float,
    ) -> DensityGrid:
        """
        Histogram density of ``samples`` on equal-width bins.

        Samples outside ``edges`` are dropped but still count in the
        normalization.
        """
        samples = np.asarray(samples, dtype=np.float64)
        counts, edges = np.histogram(samples, bins=np.asarray(edges))
        width = np.diff(edges)
        density = counts / (samples.size * width)
        centers = 0.5 * (edges[:-1] + edges[1:])
        return cls(centers, density, time)

    def __len__(self) -> int:
        return self.y.size

    @property
    def width(self) -> float:
        return float((self.y[-1] - self.y[0]) / (self.y.size - 1))

    @property
    def total_mass(self) -> float:
        return float(self.masses.sum() * self.width)

    def cdf(self) -> FloatArray:
        return np.cumsum(self.masses) * self.width

    def to_frame(self) -> pl.DataFrame:
        return pl.DataFrame({"y": self.y, "mass": self.masses})

    def to_dict(self) -> dict[str, Any]:
        return {
            "time": self.time,
            "y": self.y.tolist(),
            "mass": self.masses.tolist(),
            **density_moments(self),
        }


def density_moments(grid: DensityGrid) -> dict[str, float]:
    """Total mass, mean and variance of a density on its nodes."""
    w = grid.masses * grid.width
    mass = float(w.sum())
    if mass <= 0:
        return {"mass": 0.0, "mean": math.nan, "variance": math.nan}
    mean = float(np.dot(w, grid.y) / mass)
    variance = float(np.dot(w, (grid.y - mean) ** 2) / mass)
    return {"mass": mass, "mean": mean, "variance": variance}
