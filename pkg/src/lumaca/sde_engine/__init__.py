from __future__ import annotations

from lumaca.sde_engine.driver import (
    DriverBatch,
    DrivingTriple,
    make_driver,
    make_drivers,
)
from lumaca.sde_engine.duality import (
    classical_euler,
    duality_residual,
    solve_duality,
)
from lumaca.sde_engine.euler import (
    SolutionPath,
    solve_euler,
    solve_euler_batch,
)
from lumaca.sde_engine.matrix import (
    MatrixCoeffs,
    MatrixSolution,
    solve_linear_matrix,
)
from lumaca.sde_engine.spec import SdeSpec

__all__ = [
    "DriverBatch",
    "DrivingTriple",
    "MatrixCoeffs",
    "MatrixSolution",
    "SdeSpec",
    "SolutionPath",
    "classical_euler",
    "duality_residual",
    "make_driver",
    "make_drivers",
    "solve_duality",
    "solve_euler",
    "solve_euler_batch",
    "solve_linear_matrix",
]
