"""
Driving processes of a time-changed SDE.

A driver bundles the Lebesgue clock (the outer grid), a continuous
time-change ``E`` and the time-changed Brownian motion ``B o E``. The
Brownian motion is simulated on the inner clock and composed with ``E``, so
the classical (inner) and time-changed (outer) views share their noise path
by path.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any

import numpy as np

from lumaca.exceptions import ConfigurationError
from lumaca.path_calculus.cadlag import CadlagPath, union_grid
from lumaca.path_calculus.fixtures import brownian_path
from lumaca.path_calculus.integrals import compose
from lumaca.timechange.inverse import TimeChangePair
from lumaca.timechange.paths import MonotonePath

if TYPE_CHECKING:
    from collections.abc import Iterable, Sequence

    from lumaca.timechange.clocks import ClockSpec
    from lumaca.typing import FloatArray

logger = logging.getLogger(__name__)

__all__ = ["DriverBatch", "DrivingTriple", "make_driver", "make_drivers"]


@dataclass(frozen=True)
class DrivingTriple:
    """
    ``(t, E_t, B_{E_t})`` on the outer grid of ``pair``.

    Attributes
    ----------
    pair
        Double-bracket pair; ``pair.e`` is the time-change.
    b_of_e
        ``B(E_t) - B(E_0)`` on the outer grid; starts at 0.
    inner_b
        The Brownian motion on the inner clock, for duality and
        verification. Its grid contains every value of ``E``.
    seed, index
        Base seed and ensemble index the driver was drawn with.
    """

    pair: TimeChangePair
    b_of_e: CadlagPath
    inner_b: CadlagPath | None = None
    seed: int | None = None
    index: int = 0

    @property
    def grid(self) -> FloatArray:
        return self.pair.e.grid

    @property
    def e(self) -> MonotonePath:
        return self.pair.e

    @property
    def e0(self) -> float:
        return float(self.pair.e.values[0])

    def clock_increments(self) -> FloatArray:
        """``E_t - E_0`` on the outer grid."""
        return self.pair.e.values - self.pair.e.values[0]

    def restrict(self, t_max: float) -> DrivingTriple:
        """The same driver on the outer grid points ``<= t_max``."""
        grid = self.pair.e.grid
        k = int(np.searchsorted(grid, t_max * (1.0 + 1e-12), side="right"))
        if k < 2:
            msg = f"restriction to t <= {t_max:g} leaves fewer than two points"
            raise ConfigurationError(msg, key="t_max")
        e = MonotonePath(grid[:k], self.pair.e.values[:k], self.pair.e.interp)
        pair = TimeChangePair(d=self.pair.d, e=e, bracket=self.pair.bracket)
        b = self.b_of_e
        return DrivingTriple(
            pair=pair,
            b_of_e=CadlagPath(grid[:k], b.values[:k], interp=b.interp),
            inner_b=self.inner_b,
            seed=self.seed,
            index=self.index,
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "t": self.grid,
            "e": self.pair.e.values,
            "b_of_e": self.b_of_e.values,
            "seed": self.seed,
            "index": self.index,
        }


def _inner_grid(pair: TimeChangePair) -> FloatArray:
    top = float(pair.e.values[-1])
    d_grid = pair.d.grid[pair.d.grid <= top]
    return union_grid([0.0], d_grid, pair.e.values)


def make_driver(
        pair: TimeChangePair,
        seed: int,
        index: int = 0,
        *,
        noise_index: int | None = None,
) -> DrivingTriple:
    """
    Draw the Brownian motion of a driver and compose it with ``pair.e``.

    Parameters
    ----------
    pair
        Double-bracket pair.
    seed, index
        Base seed and ensemble index; the Brownian path uses the
        ``BROWNIAN`` stream at ``noise_index`` (``index`` by default).

    Raises
    ------
    UnsupportedBracketError
        If the time-change is not continuous.
    """
    pair.require_double("make_driver")
    inner = _inner_grid(pair)
    b = brownian_path(inner, seed, index if noise_index is None else noise_index)
    be = compose(b, pair.e)
    be = be - float(be.values[0])
    return DrivingTriple(pair=pair, b_of_e=be, inner_b=b, seed=seed, index=index)


def make_drivers(
        pair: TimeChangePair,
        seed: int,
        n_noise: int,
        index: int = 0,
) -> list[DrivingTriple]:
    """
    ``n_noise`` drivers sharing the clock of ``pair`` with independent
    Brownian motions.
    """
    if n_noise < 1:
        msg = f"n_noise must be >= 1, got {n_noise}"
        raise ConfigurationError(msg, key="n_noise")
    return [
        make_driver(pair, seed, index, noise_index=index * n_noise + k)
        for k in range(n_noise)
    ]


@dataclass(frozen=True)
class DriverBatch:
    """
    Outer arrays of several drivers stacked row-wise on a common grid.

    Attributes
    ----------
    t
        The outer grid, shape ``(n,)``.
    e, b_of_e
        Shape ``(n_paths, n)``; ``e`` is the raw clock (starting at
        ``e(0)``).
    indices
        Ensemble index of every row.
    """

    t: FloatArray
    e: FloatArray
    b_of_e: FloatArray
    indices: tuple[int, ...]
    drivers: tuple[DrivingTriple, ...] = field(repr=False, default=())

    def __len__(self) -> int:
        return len(self.indices)

    @property
    def clock(self) -> FloatArray:
        """``E_t - E_0`` per row."""
        return self.e - self.e[:, :1]

    @classmethod
    def from_drivers(cls, drivers: Sequence[DrivingTriple]) -> DriverBatch:
        if not drivers:
            msg = "a driver batch needs at least one driver"
            raise ConfigurationError(msg)
        t = drivers[0].grid
        for drv in drivers[1:]:
            if drv.grid.shape != t.shape or not np.array_equal(drv.grid, t):
                msg = "drivers of a batch must share their outer grid"
                raise ConfigurationError(msg)
        return cls(
            t=t,
            e=np.stack([d.pair.e.values for d in drivers]),
            b_of_e=np.stack([d.b_of_e.values for d in drivers]),
            indices=tuple(d.index for d in drivers),
            drivers=tuple(drivers),
        )

    @classmethod
    def build(
            cls,
            clock: ClockSpec,
            seed: int,
            indices: Iterable[int],
    ) -> DriverBatch:
        """Drivers of the given ensemble indices for ``clock``."""
        drivers = [make_driver(clock.build(seed, i), seed, i) for i in indices]
        logger.debug("built %d %s drivers", len(drivers), clock.kind)
        return cls.from_drivers(drivers)
