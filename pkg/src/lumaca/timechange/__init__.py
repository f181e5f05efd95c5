from __future__ import annotations

from lumaca.timechange.clocks import (
    ClockSpec,
    bridge_pair,
    identity_pair,
    inverse_stable_pair,
    read_time_change,
    scaled_pair,
    step_time_change,
    user_path_pair,
)
from lumaca.timechange.inverse import (
    TimeChangePair,
    generalized_inverse,
    is_synchronized,
    make_pair,
)
from lumaca.timechange.laws import (
    ScalingLaw,
    estimate_scaling_law,
    flat_fraction,
    sample_clock,
    sample_clock_exact,
)
from lumaca.timechange.paths import MonotonePath, uniform_grid
from lumaca.timechange.subordinator import (
    StableSubordinatorConfig,
    simulate_stable_subordinator,
    stable_variates,
)

__all__ = [
    "ClockSpec",
    "MonotonePath",
    "ScalingLaw",
    "StableSubordinatorConfig",
    "TimeChangePair",
    "bridge_pair",
    "estimate_scaling_law",
    "flat_fraction",
    "generalized_inverse",
    "identity_pair",
    "inverse_stable_pair",
    "is_synchronized",
    "make_pair",
    "read_time_change",
    "sample_clock",
    "sample_clock_exact",
    "scaled_pair",
    "simulate_stable_subordinator",
    "stable_variates",
    "step_time_change",
    "uniform_grid",
    "user_path_pair",
]
