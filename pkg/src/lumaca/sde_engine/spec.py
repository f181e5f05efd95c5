from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Any

import numpy as np

from lumaca.closed_form.coeffs import is_zero
from lumaca.exceptions import ConfigurationError

if TYPE_CHECKING:
    from lumaca.closed_form.coeffs import LinearCoeffs
    from lumaca.typing import ArrayLike, ClockCoefficient, Coefficient, FloatArray

logger = logging.getLogger(__name__)

__all__ = ["SdeSpec"]


@dataclass(frozen=True)
class SdeSpec:
    """
    ``dX = rho(t, E, X-) dt + mu(t, E, X-) dE + sigma(t, E, X-) dB_E``.

    Coefficients are functions of ``(t, u, x)`` evaluated elementwise on
    arrays; ``rho=None`` means there is no ``dt`` term, which the duality
    route requires.

    Attributes
    ----------
    noise_factors
        ``(mu2, sigma2)`` when ``mu = mu2(t, u) x`` and
        ``sigma = sigma2(t, u) x``; needed by the reduction method.
    lipschitz_hint
        Lipschitz constant in ``x`` promised by the caller.
    """

    mu: Coefficient
    sigma: Coefficient
    rho: Coefficient | None = None
    x0: float = 1.0
    lipschitz_hint: float | None = None
    name: str = "custom"
    noise_factors: tuple[ClockCoefficient, ClockCoefficient] | None = None

    def __post_init__(self) -> None:
        if not math.isfinite(self.x0):
            msg = f"x0 must be finite, got {self.x0}"
            raise ConfigurationError(msg, key="x0")
        if self.lipschitz_hint is not None and not self.lipschitz_hint > 0:
            msg = f"lipschitz_hint must be positive, got {self.lipschitz_hint}"
            raise ConfigurationError(msg, key="lipschitz_hint")

    @property
    def has_dt_term(self) -> bool:
        return self.rho is not None

    def drift(self, t: ArrayLike, u: ArrayLike, x: FloatArray) -> FloatArray:
        if self.rho is None:
            return np.zeros_like(x)
        return np.broadcast_to(np.asarray(self.rho(t, u, x), np.float64), x.shape)

    def check_lipschitz(
            self,
            t: ArrayLike,
            u: ArrayLike,
            x: ArrayLike,
            *,
            dx: float = 1e-6,
    ) -> float:
        """
        Largest finite-difference quotient in ``x`` over sampled points.

        Raises
        ------
        ConfigurationError
            If a quotient exceeds ``1.1 * lipschitz_hint``.
        """
        t_arr, u_arr, x_arr = np.broadcast_arrays(
            np.asarray(t, np.float64),
            np.asarray(u, np.float64),
            np.asarray(x, np.float64),
        )
        worst = 0.0
        for name, fn in (("rho", self.rho), ("mu", self.mu), ("sigma", self.sigma)):
            if fn is None:
                continue
            hi = np.asarray(fn(t_arr, u_arr, x_arr + dx), np.float64)
            lo = np.asarray(fn(t_arr, u_arr, x_arr - dx), np.float64)
            q = float(np.max(np.abs(hi - lo) / (2.0 * dx)))
            logger.debug("lipschitz quotient of %s: %.4g", name, q)
            worst = max(worst, q)
        if self.lipschitz_hint is not None and worst > 1.1 * self.lipschitz_hint:
            msg = (
                f"sampled Lipschitz quotient {worst:.4g} exceeds 1.1 x the "
                f"hint {self.lipschitz_hint:g} of {self.name!r}"
            )
            raise ConfigurationError(msg, key="lipschitz_hint")
        return worst

    @classmethod
    def from_linear(cls, coeffs: LinearCoeffs, name: str = "linear") -> SdeSpec:
        """The SDE of a set of linear coefficients."""
        c = coeffs

        def mu(t: Any, u: Any, x: Any) -> Any:
            return c.mu1(t, u) + c.mu2(t, u) * x  # type: ignore[operator]

        def sigma(t: Any, u: Any, x: Any) -> Any:
            return c.sigma1(t, u) + c.sigma2(t, u) * x  # type: ignore[operator]

        def rho(t: Any, u: Any, x: Any) -> Any:
            return c.rho1(t, u) + c.rho2(t, u) * x  # type: ignore[operator]

        multiplicative = is_zero(c.mu1) and is_zero(c.sigma1)  # type: ignore[arg-type]
        return cls(
            mu=mu,
            sigma=sigma,
            rho=rho if c.has_dt_term else None,
            x0=c.x0,
            name=name,
            noise_factors=(c.mu2, c.sigma2) if multiplicative else None,  # type: ignore[arg-type]
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "x0": self.x0,
            "has_dt_term": self.has_dt_term,
            "lipschitz_hint": self.lipschitz_hint,
        }
