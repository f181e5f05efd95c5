"""
Ready-made time-change pairs.

Every constructor returns a :class:`TimeChangePair` whose ``e`` lives on a
uniform outer grid ``[0, horizon]`` and whose ``d`` covers the inner clock far
enough to invert it there.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING, Any

import numpy as np
import polars as pl

from lumaca.exceptions import ConfigurationError
from lumaca.timechange.inverse import TimeChangePair, generalized_inverse
from lumaca.timechange.paths import MonotonePath, uniform_grid
from lumaca.timechange.subordinator import (
    StableSubordinatorConfig,
    simulate_stable_subordinator,
)
from lumaca.utils.random import Stream, path_generator

if TYPE_CHECKING:
    from lumaca.typing import ClockKind

logger = logging.getLogger(__name__)

__all__ = [
    "ClockSpec",
    "bridge_pair",
    "identity_pair",
    "inverse_stable_pair",
    "scaled_pair",
    "step_time_change",
    "user_path_pair",
]


def identity_pair(step: float, horizon: float) -> TimeChangePair:
    """``E_t = t``: the classical clock."""
    outer = uniform_grid(step, horizon)
    inner = uniform_grid(step, outer[-1] + step)
    d = MonotonePath.identity(inner, interp="linear")
    return TimeChangePair(d=d, e=generalized_inverse(d, outer), bracket="double")


def scaled_pair(rate: float, step: float, horizon: float) -> TimeChangePair:
    """``E_t = rate * t`` for a positive ``rate``."""
    if not (math.isfinite(rate) and rate > 0):
        msg = f"rate must be a positive real, got {rate}"
        raise ConfigurationError(msg, key="rate")
    outer = uniform_grid(step, horizon)
    inner = uniform_grid(step, rate * outer[-1] + step)
    d = MonotonePath(inner, inner / rate, "linear")
    return TimeChangePair(d=d, e=generalized_inverse(d, outer), bracket="double")


def inverse_stable_pair(
        beta: float,
        step: float,
        horizon: float,
        seed: int,
        index: int = 0,
) -> TimeChangePair:
    """
    Inverse of a beta-stable subordinator on ``[0, horizon]``.

    The subordinator is simulated with the same ``step`` on the inner clock
    and extended until it exceeds ``horizon``.
    """
    cfg = StableSubordinatorConfig(
        beta=beta, step=step, horizon=step, seed=seed
    )
    outer = uniform_grid(step, horizon)
    d = simulate_stable_subordinator(cfg, until=outer[-1], index=index)
    e = generalized_inverse(d, outer)
    return TimeChangePair(d=d, e=e, bracket="double")


def bridge_pair(
        beta: float,
        step: float,
        seed: int,
        index: int = 0,
) -> TimeChangePair:
    """
    Inverse-stable clock rescaled to reach 1 exactly at ``t = 1``.

    With ``E`` the inverse of ``D`` on ``[0, 1]``, the pair is
    ``E_t / E_1`` together with ``D`` re-gridded on ``grid / E_1``, so the
    rescaled clock increases to 1 as ``t`` increases to 1.
    """
    base = inverse_stable_pair(beta, step, 1.0, seed, index)
    e1 = float(base.e.values[-1])
    d = MonotonePath(base.d.grid / e1, base.d.values, "step")
    e = generalized_inverse(d, base.e.grid)
    return TimeChangePair(d=d, e=e, bracket="double")


def user_path_pair(
        e: MonotonePath,
        inner_step: float | None = None,
) -> TimeChangePair:
    """Pair a user supplied time-change with its generalized inverse."""
    return TimeChangePair.from_time_change(e, inner_step)


def step_time_change(at: float, step: float, horizon: float) -> MonotonePath:
    """The step path ``1_{[at, inf)}`` on a uniform grid."""
    if not 0.0 < at <= horizon:
        msg = f"jump location must lie in (0, horizon], got {at}"
        raise ConfigurationError(msg, key="at")
    grid = uniform_grid(step, horizon)
    values = (grid >= at - 1e-12 * max(1.0, at)).astype(np.float64)
    return MonotonePath(grid, values, "step")


def read_time_change(path: Path | str) -> MonotonePath:
    """Read a time-change from a CSV file with columns ``t`` and ``value``."""
    path = Path(path)
    if not path.is_file():
        msg = f"time-change file not found: {path}"
        raise ConfigurationError(msg, key="path")
    frame = pl.read_csv(path)
    missing = {"t", "value"} - set(frame.columns)
    if missing:
        msg = f"time-change file {path} lacks column(s) {sorted(missing)}"
        raise ConfigurationError(msg, key="path")
    frame = frame.select(pl.col("t", "value").cast(pl.Float64))
    return MonotonePath(
        frame["t"].to_numpy(), frame["value"].to_numpy(), "linear"
    )


@dataclass(frozen=True)
class ClockSpec:
    """
    Serializable recipe of a clock.

    Attributes
    ----------
    kind
        ``identity``, ``scaled``, ``inverse_stable``, ``bridge`` or
        ``user_path``.
    beta
        Stability index for ``inverse_stable`` and ``bridge``.
    step, horizon
        Outer grid.
    scale_low, scale_high
        Range of the uniform factor ``R`` of a ``scaled`` clock
        ``E_t = R t``; equal bounds give a deterministic rate.
    path
        CSV file of a ``user_path`` clock.
    """

    kind: ClockKind
    step: float
    horizon: float
    beta: float | None = None
    scale_low: float = 1.0
    scale_high: float = 1.0
    path: Path | None = None
    _user: MonotonePath | None = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        match self.kind:
            case "identity":
                pass
            case "inverse_stable" | "bridge":
                if self.beta is None or not 0.0 < self.beta < 1.0:
                    msg = f"{self.kind} clock needs beta in (0, 1), got {self.beta}"
                    raise ConfigurationError(msg, key="beta")
                if self.kind == "bridge" and abs(self.horizon - 1.0) > 1e-12:
                    msg = "a bridge clock runs on [0, 1]; set horizon = 1"
                    raise ConfigurationError(msg, key="horizon")
            case "scaled":
                if not 0.0 < self.scale_low <= self.scale_high:
                    msg = (
                        "scaled clock needs 0 < scale_low <= scale_high, got "
                        f"({self.scale_low}, {self.scale_high})"
                    )
                    raise ConfigurationError(msg, key="scale_low")
            case "user_path":
                if self.path is None:
                    msg = "user_path clock needs a path"
                    raise ConfigurationError(msg, key="path")
                object.__setattr__(self, "_user", read_time_change(self.path))
            case _:
                msg = f"unknown clock kind {self.kind!r}"
                raise ConfigurationError(msg, key="kind")
        uniform_grid(self.step, self.horizon)

    @property
    def is_random(self) -> bool:
        return self.kind in ("inverse_stable", "bridge") or (
            self.kind == "scaled" and self.scale_low < self.scale_high
        )

    @property
    def mean_rate(self) -> float:
        """``E[R]`` of a scaled clock."""
        return 0.5 * (self.scale_low + self.scale_high)

    def draw_rate(self, seed: int, index: int = 0) -> float:
        if self.scale_low == self.scale_high:
            return float(self.scale_low)
        rng = path_generator(seed, Stream.CLOCK_SCALE, index)
        return float(rng.uniform(self.scale_low, self.scale_high))

    def build(self, seed: int, index: int = 0) -> TimeChangePair:
        """The pair of path ``index`` of an ensemble with base ``seed``."""
        match self.kind:
            case "identity":
                return identity_pair(self.step, self.horizon)
            case "scaled":
                rate = self.draw_rate(seed, index)
                return scaled_pair(rate, self.step, self.horizon)
            case "inverse_stable":
                assert self.beta is not None
                return inverse_stable_pair(
                    self.beta, self.step, self.horizon, seed, index
                )
            case "bridge":
                assert self.beta is not None
                return bridge_pair(self.beta, self.step, seed, index)
            case "user_path":
                assert self._user is not None
                return user_path_pair(self._user, self.step)
        msg = f"unknown clock kind {self.kind!r}"  # pragma: no cover
        raise ConfigurationError(msg, key="kind")  # pragma: no cover

    def with_step(self, step: float) -> ClockSpec:
        return ClockSpec(
            kind=self.kind,
            step=step,
            horizon=self.horizon,
            beta=self.beta,
            scale_low=self.scale_low,
            scale_high=self.scale_high,
            path=self.path,
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "step": self.step,
            "horizon": self.horizon,
            "beta": self.beta,
            "scale_low": self.scale_low,
            "scale_high": self.scale_high,
            "path": None if self.path is None else Path(self.path).as_posix(),
        }
