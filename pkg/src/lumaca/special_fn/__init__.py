from __future__ import annotations

from lumaca.special_fn.fractional import (
    fractional_integral,
    product_trapezoid_weights,
)
from lumaca.special_fn.gamma import gamma_fn
from lumaca.special_fn.mittag_leffler import (
    MittagLefflerParams,
    mittag_leffler,
    mittag_leffler_with_error,
)

__all__ = [
    "MittagLefflerParams",
    "fractional_integral",
    "gamma_fn",
    "mittag_leffler",
    "mittag_leffler_with_error",
    "product_trapezoid_weights",
]
