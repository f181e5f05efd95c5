from __future__ import annotations

from lumaca.fracpde.compare import (
    DensityComparison,
    compare_densities,
    heat_kernel,
    subdiffusion_variance_slope,
)
from lumaca.fracpde.monte_carlo import mc_density, mc_samples
from lumaca.fracpde.problem import DensityGrid, FracPdeProblem, density_moments
from lumaca.fracpde.solver import FracPdeResult, l1_weights, solve_caputo_fpe

__all__ = [
    "DensityComparison",
    "DensityGrid",
    "FracPdeProblem",
    "FracPdeResult",
    "compare_densities",
    "density_moments",
    "heat_kernel",
    "l1_weights",
    "mc_density",
    "mc_samples",
    "solve_caputo_fpe",
    "subdiffusion_variance_slope",
]
