from __future__ import annotations

import math

import scipy.special

from lumaca.exceptions import SpecialFunctionDomainError

__all__ = ["gamma_fn"]

# largest x with a finite double-precision Gamma(x)
_GAMMA_OVERFLOW = 171.62


def gamma_fn(x: float) -> float:
    """
    Gamma function on the positive real axis.

    Parameters
    ----------
    x
        Real argument, ``0 < x <= 171.62``.

    Raises
    ------
    SpecialFunctionDomainError
        If ``x`` is not a positive finite real, or Gamma(x) overflows.
    """
    x = float(x)
    if not math.isfinite(x) or x <= 0:
        msg = f"gamma_fn is defined for finite x > 0, got {x}"
        raise SpecialFunctionDomainError(msg)
    if x > _GAMMA_OVERFLOW:
        msg = f"gamma_fn({x}) overflows double precision"
        raise SpecialFunctionDomainError(msg)
    return float(scipy.special.gamma(x))
