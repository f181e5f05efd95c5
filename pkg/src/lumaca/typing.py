from __future__ import annotations

from collections.abc import Callable
from typing import TYPE_CHECKING, Literal, TypeAlias, Union

import numpy as np

if TYPE_CHECKING:
    from numpy.typing import NDArray

__all__ = [
    "FloatArray",
    "ArrayLike",
    "Interpolation",
    "Bracket",
    "Scheme",
    "Provenance",
    "PresetName",
    "ClockKind",
    "Command",
    "Coefficient",
    "ClockCoefficient",
    "ScalarFunction",
]

FloatArray: TypeAlias = "NDArray[np.float64]"

ArrayLike: TypeAlias = Union[float, "NDArray[np.float64]"]

# ----------------------------------------------------------------------

Interpolation: TypeAlias = Literal["step", "linear"]

Bracket: TypeAlias = Literal["single", "double"]

Scheme: TypeAlias = Literal["euler", "duality", "closed_form", "reduction"]

Provenance: TypeAlias = Literal[
    "closed_form",
    "quadrature",
    "mittag_leffler",
    "oracle",
]

PresetName: TypeAlias = Literal[
    "black_scholes",
    "mittag_leffler_decay",
    "bridge",
    "ornstein_uhlenbeck",
    "logistic",
]

ClockKind: TypeAlias = Literal[
    "identity",
    "scaled",
    "inverse_stable",
    "bridge",
    "user_path",
]

Command: TypeAlias = Literal[
    "simulate",
    "verify",
    "moments",
    "converge",
    "fracpde",
    "special",
]

# ----------------------------------------------------------------------

# coefficients are evaluated elementwise on arrays: (t, u, x) -> value
Coefficient: TypeAlias = Callable[..., "ArrayLike"]

# linear coefficients depend on the clocks only: (t, u) -> value
ClockCoefficient: TypeAlias = Callable[..., "ArrayLike"]

ScalarFunction: TypeAlias = Callable[..., "ArrayLike"]
