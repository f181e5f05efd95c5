"""
Named model presets with explicit pathwise solutions.

Every preset knows its SDE, its linear coefficients (when linear), its
solution along a driver and the classical solution it degenerates to when
the clock is the identity.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Mapping
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import TYPE_CHECKING, Any, ClassVar

import numpy as np

from lumaca.closed_form.coeffs import LinearCoeffs
from lumaca.closed_form.quadrature import DriverArrays, finite_or_raise, left_sum, trapezoid
from lumaca.exceptions import ConfigurationError
from lumaca.path_calculus.cadlag import CadlagPath

if TYPE_CHECKING:
    from lumaca.sde_engine.driver import DrivingTriple
    from lumaca.sde_engine.spec import SdeSpec
    from lumaca.typing import FloatArray, PresetName

logger = logging.getLogger(__name__)

__all__ = ["PRESETS", "ModelPreset", "preset_solution"]

Params = Mapping[str, float]


def _require(cond: bool, name: str, msg: str) -> None:  # noqa: FBT001
    if not cond:
        raise ConfigurationError(msg, key=name)


class _Model:
    """Closed-form knowledge about one family of SDEs."""

    name: ClassVar[str]
    defaults: ClassVar[dict[str, float]]

    @classmethod
    def validate(cls, p: Params) -> None:
        pass

    @classmethod
    def linear_coeffs(cls, p: Params) -> LinearCoeffs | None:
        return None

    @classmethod
    def sde_spec(cls, p: Params) -> SdeSpec:
        from lumaca.sde_engine.spec import SdeSpec

        coeffs = cls.linear_coeffs(p)
        assert coeffs is not None
        return SdeSpec.from_linear(coeffs, name=cls.name)

    @classmethod
    def arrays(
            cls,
            p: Params,
            t: FloatArray,
            u: FloatArray,
            noise: FloatArray,
    ) -> FloatArray:
        """Solution from the outer arrays ``t``, ``E_t`` and ``B(E_t) - B(E_0)``."""
        raise NotImplementedError

    @classmethod
    def support(cls, driver: DrivingTriple) -> DrivingTriple:
        return driver

    @classmethod
    def solution(cls, p: Params, driver: DrivingTriple) -> CadlagPath:
        driver = cls.support(driver)
        arr = DriverArrays.of(driver)
        x = cls.arrays(p, arr.t, arr.u, arr.noise)
        finite_or_raise(f"{cls.name} solution", x, arr.t)
        return CadlagPath(arr.t, x, interp="step")

    @classmethod
    def classical(cls, p: Params, grid: FloatArray, b: FloatArray) -> CadlagPath:
        """The solution for ``E_t = t`` driven by the Brownian path ``b``."""
        grid = np.asarray(grid, dtype=np.float64)
        x = cls.arrays(p, grid, grid, np.asarray(b, dtype=np.float64) - b[0])
        return CadlagPath(grid, x, interp="step")


class BlackScholesAnalogue(_Model):
    """``dX = rho X dt + mu X dE + sigma X dB_E``."""

    name = "black_scholes"
    defaults: ClassVar[dict[str, float]] = {
        "rho": 0.05, "mu": 0.1, "sigma": 0.3, "x0": 1.0,
    }

    @classmethod
    def rates(cls, p: Params) -> tuple[float, float, float]:
        return p["rho"], p["mu"], p["sigma"]

    @classmethod
    def validate(cls, p: Params) -> None:
        _require(p["sigma"] >= 0, "sigma", f"sigma must be nonnegative, got {p['sigma']}")
        _require(p["x0"] > 0, "x0", f"x0 must be positive, got {p['x0']}")

    @classmethod
    def linear_coeffs(cls, p: Params) -> LinearCoeffs:
        rho, mu, sigma = cls.rates(p)
        return LinearCoeffs(rho2=rho, mu2=mu, sigma2=sigma, x0=p["x0"])

    @classmethod
    def arrays(cls, p: Params, t: FloatArray, u: FloatArray, noise: FloatArray) -> FloatArray:
        rho, mu, sigma = cls.rates(p)
        return p["x0"] * np.exp(rho * t + (mu - 0.5 * sigma**2) * (u - u[0]) + sigma * noise)


class MittagLefflerDecay(BlackScholesAnalogue):
    """``dX = rho X dt - lam X dE + sigma X dB_E``."""

    name = "mittag_leffler_decay"
    defaults: ClassVar[dict[str, float]] = {
        "rho": 0.0, "lam": 1.0, "sigma": 0.3, "x0": 1.0,
    }

    @classmethod
    def rates(cls, p: Params) -> tuple[float, float, float]:
        return p["rho"], -p["lam"], p["sigma"]

    @classmethod
    def validate(cls, p: Params) -> None:
        super().validate(p)
        _require(p["lam"] > 0, "lam", f"lam must be positive, got {p['lam']}")


class TimeChangedBridge(_Model):
    """
    ``dX = (b - gamma X) / (1 - t) dt + (c - eta X) / (1 - E) dE + dB_E``.

    Solved on ``[0, 1)`` with ``Phi_t = (1 - t)**gamma ((1 - E_t) / (1 - E_0))**eta``.
    For the identity clock and ``gamma + eta = 1`` it is a Brownian bridge
    from ``a`` to ``b + c``.
    """

    name = "bridge"
    defaults: ClassVar[dict[str, float]] = {
        "a": 0.0, "b": 0.0, "c": 1.0, "gamma": 0.0, "eta": 1.0,
    }

    @classmethod
    def linear_coeffs(cls, p: Params) -> LinearCoeffs:
        b, c, gamma, eta = p["b"], p["c"], p["gamma"], p["eta"]
        # zero dt parts stay constant so the model qualifies for duality
        return LinearCoeffs(
            rho1=0.0 if b == 0.0 else lambda t, u: b / (1.0 - t),
            rho2=0.0 if gamma == 0.0 else lambda t, u: -gamma / (1.0 - t),
            mu1=lambda t, u: c / (1.0 - u),
            mu2=lambda t, u: -eta / (1.0 - u),
            sigma1=1.0,
            x0=p["a"],
        )

    @classmethod
    def support(cls, driver: DrivingTriple) -> DrivingTriple:
        """The driver on the points where ``t < 1`` and ``E_t < 1``."""
        t, u = driver.grid, driver.pair.e.values
        inside = np.nonzero((t < 1.0) & (u < 1.0))[0]
        return driver.restrict(float(t[inside[-1]]))

    @classmethod
    def solution(cls, p: Params, driver: DrivingTriple) -> CadlagPath:
        """
        The explicit solution on ``[0, 1)``.

        Once the clock has reached 1 at ``tau < 1`` it stays flat, the
        ``dE`` and ``dB_E`` parts vanish and ``X`` follows
        ``dX = (b - gamma X) / (1 - t) dt`` from its limit ``c / eta``.
        With ``eta = 0`` that limit is infinite, and a clock that moves past 1
        leaves the solution undefined; in both cases the path ends at ``tau``.
        """
        x = super().solution(p, driver)
        t, u = driver.grid, driver.pair.e.values
        tail = np.nonzero((t < 1.0) & (u >= 1.0))[0]
        if tail.size == 0 or p["eta"] <= 0.0 or np.any(u[tail] > 1.0):
            return x
        t_tail = t[tail]
        # first time the clock reaches 1: D just before inner time 1
        tau = min(float(driver.pair.d.left_limit(1.0)), float(t_tail[0]))
        tau = max(tau, float(x.grid[-1]))
        b, gamma = p["b"], p["gamma"]
        start = p["c"] / p["eta"]
        if gamma == 0.0:
            frozen = start + b * np.log((1.0 - tau) / (1.0 - t_tail))
        else:
            level = b / gamma
            frozen = level + (start - level) * ((1.0 - t_tail) / (1.0 - tau)) ** gamma
        return CadlagPath(
            np.concatenate([x.grid, t_tail]),
            np.concatenate([x.values, frozen]),
            interp="step",
        )

    @classmethod
    def arrays(cls, p: Params, t: FloatArray, u: FloatArray, noise: FloatArray) -> FloatArray:
        keep = (t < 1.0) & (u < 1.0)
        t, u, noise = t[keep], u[keep], noise[keep]
        gamma, eta = p["gamma"], p["eta"]
        phi = (1.0 - t) ** gamma * ((1.0 - u) / (1.0 - u[0])) ** eta
        inv = 1.0 / phi

        # the dE integrand is c (1 - E)**(-eta - 1) up to a factor frozen at
        # the left end of the cell; integrate the power of 1 - E exactly
        prim = -np.log(1.0 - u) if eta == 0.0 else (1.0 - u) ** (-eta) / eta
        scale = p["c"] * (1.0 - u[0]) ** eta * (1.0 - t[:-1]) ** (-gamma)
        by_clock = np.concatenate([[0.0], np.cumsum(scale * np.diff(prim))])

        acc = (
            trapezoid(p["b"] / (1.0 - t) * inv, t)
            + by_clock
            + left_sum(inv, np.diff(noise))
        )
        return phi * (p["a"] + acc)

    @classmethod
    def classical(cls, p: Params, grid: FloatArray, b: FloatArray) -> CadlagPath:
        grid = np.asarray(grid, dtype=np.float64)
        keep = grid < 1.0
        x = cls.arrays(p, grid, grid, np.asarray(b, np.float64) - b[0])
        return CadlagPath(grid[keep], x, interp="step")


class OrnsteinUhlenbeckAnalogue(_Model):
    """``dX = -alpha X dt + mu dE + sigma dB_E``."""

    name = "ornstein_uhlenbeck"
    defaults: ClassVar[dict[str, float]] = {
        "alpha": 1.0, "mu": 0.5, "sigma": 0.3, "x0": 1.0,
    }

    @classmethod
    def validate(cls, p: Params) -> None:
        _require(p["alpha"] > 0, "alpha", f"alpha must be positive, got {p['alpha']}")
        _require(p["sigma"] > 0, "sigma", f"sigma must be positive, got {p['sigma']}")
        _require(p["x0"] != 0, "x0", "x0 must be nonzero")

    @classmethod
    def linear_coeffs(cls, p: Params) -> LinearCoeffs:
        return LinearCoeffs(
            rho2=-p["alpha"], mu1=p["mu"], sigma1=p["sigma"], x0=p["x0"]
        )

    @classmethod
    def arrays(cls, p: Params, t: FloatArray, u: FloatArray, noise: FloatArray) -> FloatArray:
        grow = np.exp(p["alpha"] * t)
        acc = p["mu"] * left_sum(grow, np.diff(u)) + p["sigma"] * left_sum(grow, np.diff(noise))
        return (p["x0"] + acc) / grow


class LogisticGrowth(_Model):
    """``dX = q X (K - X) dt + mu X dE + sigma X dB_E``."""

    name = "logistic"
    defaults: ClassVar[dict[str, float]] = {
        "q": 1.0, "K": 1.0, "x0": 0.5, "mu": 0.0, "sigma": 0.2,
    }

    @classmethod
    def validate(cls, p: Params) -> None:
        for key in ("q", "K", "x0"):
            _require(p[key] > 0, key, f"{key} must be positive, got {p[key]}")

    @classmethod
    def sde_spec(cls, p: Params) -> SdeSpec:
        from lumaca.closed_form.coeffs import ConstantCoefficient
        from lumaca.sde_engine.spec import SdeSpec

        q, cap, mu, sigma = p["q"], p["K"], p["mu"], p["sigma"]
        return SdeSpec(
            rho=lambda t, u, x: q * x * (cap - x),
            mu=lambda t, u, x: mu * x,
            sigma=lambda t, u, x: sigma * x,
            x0=p["x0"],
            name=cls.name,
            noise_factors=(ConstantCoefficient(mu), ConstantCoefficient(sigma)),
        )

    @classmethod
    def arrays(cls, p: Params, t: FloatArray, u: FloatArray, noise: FloatArray) -> FloatArray:
        q, cap, mu, sigma = p["q"], p["K"], p["mu"], p["sigma"]
        num = np.exp(q * cap * t + (mu - 0.5 * sigma**2) * (u - u[0]) + sigma * noise)
        return num / (1.0 / p["x0"] + q * trapezoid(num, t))


PRESETS: Mapping[str, type[_Model]] = MappingProxyType({
    m.name: m
    for m in (
        BlackScholesAnalogue,
        MittagLefflerDecay,
        TimeChangedBridge,
        OrnsteinUhlenbeckAnalogue,
        LogisticGrowth,
    )
})


@dataclass(frozen=True)
class ModelPreset:
    """
    A named model with its parameters.

    Missing parameters take the model defaults; unknown names and values
    outside the model's domain raise ``ConfigurationError``.

    Examples
    --------
    >>> m = ModelPreset("ornstein_uhlenbeck", {"alpha": 2.0})
    >>> m.parameters["alpha"], m.parameters["mu"]
    (2.0, 0.5)
    """

    name: PresetName
    parameters: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.name not in PRESETS:
            msg = f"unknown preset {self.name!r}; choose one of {sorted(PRESETS)}"
            raise ConfigurationError(msg, key="preset")
        model = PRESETS[self.name]
        unknown = set(self.parameters) - set(model.defaults)
        if unknown:
            msg = f"unknown parameter(s) {sorted(unknown)} for preset {self.name!r}"
            raise ConfigurationError(msg, key=sorted(unknown)[0])
        params = {**model.defaults, **{k: float(v) for k, v in self.parameters.items()}}
        for key, value in params.items():
            _require(math.isfinite(value), key, f"{key} must be finite, got {value}")
        model.validate(params)
        object.__setattr__(self, "parameters", MappingProxyType(params))

    @property
    def model(self) -> type[_Model]:
        return PRESETS[self.name]

    @property
    def is_linear(self) -> bool:
        return self.model.linear_coeffs(self.parameters) is not None

    def sde_spec(self) -> SdeSpec:
        return self.model.sde_spec(self.parameters)

    def linear_coeffs(self) -> LinearCoeffs | None:
        return self.model.linear_coeffs(self.parameters)

    def solution(self, driver: DrivingTriple) -> CadlagPath:
        return self.model.solution(self.parameters, driver)

    def classical(self, grid: FloatArray, b: FloatArray) -> CadlagPath:
        return self.model.classical(self.parameters, grid, b)

    def support(self, driver: DrivingTriple) -> DrivingTriple:
        """The part of ``driver`` on which the solution is defined."""
        return self.model.support(driver)

    def to_dict(self) -> dict[str, Any]:
        return {"name": self.name, "parameters": dict(self.parameters)}


def preset_solution(m: ModelPreset, driver: DrivingTriple) -> CadlagPath:
    """Explicit solution of preset ``m`` along ``driver``."""
    driver.pair.require_double("preset_solution")
    logger.debug("closed form of %s on %d points", m.name, len(driver.grid))
    return m.solution(driver)
