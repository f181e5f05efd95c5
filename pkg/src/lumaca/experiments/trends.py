from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import numpy as np
import polars as pl

from lumaca.closed_form.presets import preset_solution
from lumaca.exceptions import ConfigurationError
from lumaca.experiments.ensemble import check_horizon, ensemble_map

if TYPE_CHECKING:
    from collections.abc import Sequence

    from lumaca.closed_form.presets import ModelPreset
    from lumaca.sde_engine.driver import DrivingTriple
    from lumaca.timechange.clocks import ClockSpec
    from lumaca.typing import FloatArray

logger = logging.getLogger(__name__)

__all__ = ["trend_table"]

QUANTILES = (0.05, 0.5, 0.95)


def trend_table(
        preset: ModelPreset,
        clock: ClockSpec,
        times: Sequence[float],
        n_paths: int,
        seed: int,
) -> pl.DataFrame:
    """
    Mean, standard error and quantiles of ``X_t`` at each of ``times``.

    Long-horizon behavior is only tabulated over a finite horizon, nothing
    is asserted about it.

    Examples
    --------
    >>> from lumaca.closed_form import ModelPreset
    >>> from lumaca.timechange import ClockSpec
    >>> table = trend_table(
    ...     ModelPreset("ornstein_uhlenbeck"),
    ...     ClockSpec("identity", step=0.01, horizon=1.0),
    ...     [0.5, 1.0], n_paths=8, seed=1,
    ... )
    >>> table.columns
    ['t', 'mean', 'std_error', 'q05', 'q50', 'q95']
    """
    t = np.asarray(sorted(times), dtype=np.float64)
    if t.size == 0 or n_paths < 2:
        msg = "a trend table needs at least one time and two paths"
        raise ConfigurationError(msg, key="times")
    check_horizon(clock, float(t[-1]))

    def values(driver: DrivingTriple) -> FloatArray:
        return preset_solution(preset, driver)(t)

    sample = ensemble_map(values, clock, n_paths, seed)
    q = np.quantile(sample, QUANTILES, axis=0)
    logger.info("trend table of %s at %d times", preset.name, t.size)
    return pl.DataFrame(
        {
            "t": t,
            "mean": sample.mean(axis=0),
            "std_error": sample.std(axis=0, ddof=1) / np.sqrt(n_paths),
            "q05": q[0],
            "q50": q[1],
            "q95": q[2],
        }
    )
