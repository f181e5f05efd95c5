from __future__ import annotations

from lumaca.closed_form.coeffs import (
    ConstantCoefficient,
    LinearCoeffs,
    as_coefficient,
    is_zero,
)
from lumaca.closed_form.linear import (
    fundamental_solution,
    general_linear_solution,
    inner_clock_solution,
    log_fundamental,
)
from lumaca.closed_form.presets import PRESETS, ModelPreset, preset_solution
from lumaca.closed_form.quadrature import DriverArrays, left_sum, trapezoid
from lumaca.closed_form.reduction import integrating_factor, reduce_and_solve

__all__ = [
    "PRESETS",
    "ConstantCoefficient",
    "DriverArrays",
    "LinearCoeffs",
    "ModelPreset",
    "as_coefficient",
    "fundamental_solution",
    "general_linear_solution",
    "inner_clock_solution",
    "integrating_factor",
    "is_zero",
    "left_sum",
    "log_fundamental",
    "preset_solution",
    "reduce_and_solve",
    "trapezoid",
]
