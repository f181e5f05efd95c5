from __future__ import annotations

try:
    from ._version import __version__, __version_tuple__
except ModuleNotFoundError:  # pragma: no cover
    import warnings

    __version__ = "0.0.0"
    __version_tuple__ = (0, 0, 0)
    warnings.warn(
        "\nAn error occurred during package install "
        "where setuptools_scm failed to create a _version.py file."
        "\nDefaulting version to 0.0.0.",
        stacklevel=2,
    )

# utilities
from lumaca.utils.config import Config
from lumaca.utils.show_versions import show_versions

# clocks and paths
from lumaca.timechange import ClockSpec, MonotonePath, TimeChangePair
from lumaca.path_calculus import CadlagPath

# equations
from lumaca.sde_engine import SdeSpec, make_driver, solve_duality, solve_euler
from lumaca.closed_form import ModelPreset, general_linear_solution

# special functions
from lumaca.special_fn import (
    MittagLefflerParams,
    fractional_integral,
    mittag_leffler,
)

# fractional fokker-planck
from lumaca.fracpde import FracPdeProblem, solve_caputo_fpe

# other
from lumaca import exceptions

__all__ = [
    # utilities
    "Config",
    "show_versions",
    # clocks and paths
    "ClockSpec",
    "MonotonePath",
    "TimeChangePair",
    "CadlagPath",
    # equations
    "SdeSpec",
    "make_driver",
    "solve_euler",
    "solve_duality",
    "ModelPreset",
    "general_linear_solution",
    # special functions
    "MittagLefflerParams",
    "mittag_leffler",
    "fractional_integral",
    # fractional fokker-planck
    "FracPdeProblem",
    "solve_caputo_fpe",
    # other
    "exceptions",
]
