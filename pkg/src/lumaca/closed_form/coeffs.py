from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace
from typing import TYPE_CHECKING, Any

import numpy as np

from lumaca.exceptions import ConfigurationError

if TYPE_CHECKING:
    from lumaca.typing import ArrayLike, ClockCoefficient, FloatArray

__all__ = ["ConstantCoefficient", "LinearCoeffs", "as_coefficient", "is_zero"]


@dataclass(frozen=True)
class ConstantCoefficient:
    """A coefficient ``(t, u) -> value`` that ignores both clocks."""

    value: float

    def __call__(self, t: ArrayLike, u: ArrayLike) -> FloatArray:
        shape = np.broadcast(np.asarray(t), np.asarray(u)).shape
        return np.full(shape, self.value, dtype=np.float64)


def as_coefficient(c: ClockCoefficient | float) -> ClockCoefficient:
    if callable(c):
        return c
    value = float(c)
    if not math.isfinite(value):
        msg = f"constant coefficient must be finite, got {c}"
        raise ConfigurationError(msg)
    return ConstantCoefficient(value)


def is_zero(c: ClockCoefficient) -> bool:
    return isinstance(c, ConstantCoefficient) and c.value == 0.0


@dataclass(frozen=True)
class LinearCoeffs:
    """
    Coefficients of the linear SDE

    ``dX = (rho1 + rho2 X) dt + (mu1 + mu2 X) dE + (sigma1 + sigma2 X) dB_E``.

    Each coefficient is a function of ``(t, u)`` (outer time, clock value)
    evaluated elementwise on arrays, or a real constant.

    Examples
    --------
    >>> c = LinearCoeffs(rho2=0.1, sigma2=0.3, x0=2.0)
    >>> c.is_homogeneous
    True
    """

    rho1: ClockCoefficient | float = 0.0
    rho2: ClockCoefficient | float = 0.0
    mu1: ClockCoefficient | float = 0.0
    mu2: ClockCoefficient | float = 0.0
    sigma1: ClockCoefficient | float = 0.0
    sigma2: ClockCoefficient | float = 0.0
    x0: float = 1.0

    def __post_init__(self) -> None:
        for f in fields(self):
            if f.name != "x0":
                object.__setattr__(self, f.name, as_coefficient(getattr(self, f.name)))
        if not math.isfinite(self.x0):
            msg = f"x0 must be finite, got {self.x0}"
            raise ConfigurationError(msg, key="x0")

    @property
    def is_homogeneous(self) -> bool:
        return all(is_zero(c) for c in (self.rho1, self.mu1, self.sigma1))  # type: ignore[arg-type]

    @property
    def has_dt_term(self) -> bool:
        return not (is_zero(self.rho1) and is_zero(self.rho2))  # type: ignore[arg-type]

    def homogeneous(self) -> LinearCoeffs:
        """The same coefficients with the inhomogeneous parts removed."""
        return replace(self, rho1=0.0, mu1=0.0, sigma1=0.0)

    def evaluate(self, name: str, t: ArrayLike, u: ArrayLike) -> FloatArray:
        fn = getattr(self, name)
        shape = np.broadcast(np.asarray(t), np.asarray(u)).shape
        return np.broadcast_to(np.asarray(fn(t, u), dtype=np.float64), shape)

    def multiplier_bound(self, t: ArrayLike, u: ArrayLike) -> float:
        """``max |rho2| + |mu2| + |sigma2|`` over the sampled points."""
        total = sum(
            np.abs(self.evaluate(name, t, u))
            for name in ("rho2", "mu2", "sigma2")
        )
        return float(np.max(total))

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"x0": self.x0}
        for f in fields(self):
            if f.name == "x0":
                continue
            c = getattr(self, f.name)
            out[f.name] = c.value if isinstance(c, ConstantCoefficient) else repr(c)
        return out
