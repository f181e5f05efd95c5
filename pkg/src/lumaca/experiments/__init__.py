from __future__ import annotations

from lumaca.experiments.convergence import ConvergenceTable, convergence_study
from lumaca.experiments.ensemble import (
    clock_increments,
    ensemble_map,
    mean_clock_curve,
    pair_map,
    target_clock_sample,
)
from lumaca.experiments.estimates import (
    McEstimate,
    MomentCheck,
    jackknife_variance_se,
    mc_estimate,
)
from lumaca.experiments.moments import (
    MatrixVerdict,
    check_matrix,
    check_mean_homogeneous,
    check_mittag_leffler,
    check_ou_mean,
    check_variance_homogeneous,
    mean_lower_bound_flag,
    ou_mean_ode,
)
from lumaca.experiments.trends import trend_table

__all__ = [
    "ConvergenceTable",
    "MatrixVerdict",
    "McEstimate",
    "MomentCheck",
    "check_matrix",
    "check_mean_homogeneous",
    "check_mittag_leffler",
    "check_ou_mean",
    "check_variance_homogeneous",
    "clock_increments",
    "convergence_study",
    "ensemble_map",
    "jackknife_variance_se",
    "mc_estimate",
    "mean_clock_curve",
    "mean_lower_bound_flag",
    "ou_mean_ode",
    "pair_map",
    "target_clock_sample",
    "trend_table",
]
