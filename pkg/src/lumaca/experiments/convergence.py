from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Any, Literal

import numpy as np
import polars as pl

from lumaca.closed_form.presets import preset_solution
from lumaca.exceptions import ConfigurationError
from lumaca.experiments.ensemble import ensemble_map
from lumaca.sde_engine.duality import solve_duality
from lumaca.sde_engine.euler import solve_euler

if TYPE_CHECKING:
    from collections.abc import Sequence

    from lumaca.closed_form.presets import ModelPreset
    from lumaca.path_calculus.cadlag import CadlagPath
    from lumaca.sde_engine.driver import DrivingTriple
    from lumaca.timechange.clocks import ClockSpec

logger = logging.getLogger(__name__)

__all__ = ["ConvergenceTable", "convergence_study"]

Reference = Literal["closed_form", "duality"]


@dataclass(frozen=True)
class ConvergenceTable:
    """Strong errors of the Euler scheme over a ladder of steps."""

    preset: str
    reference: Reference
    steps: tuple[float, ...]
    errors: tuple[float, ...]
    slope: float
    n_paths: int
    seed: int

    @property
    def is_monotone(self) -> bool:
        """Whether the error shrinks with every refinement of the step."""
        order = np.argsort(self.steps)[::-1]
        errors = np.asarray(self.errors)[order]
        return bool(np.all(np.diff(errors) < 0))

    def to_frame(self) -> pl.DataFrame:
        return pl.DataFrame(
            {"step": list(self.steps), "strong_error": list(self.errors)}
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "preset": self.preset,
            "reference": self.reference,
            "steps": list(self.steps),
            "errors": list(self.errors),
            "slope": self.slope,
            "monotone": self.is_monotone,
            "n_paths": self.n_paths,
            "seed": self.seed,
        }


def _terminal_gap(a: CadlagPath, b: CadlagPath) -> float:
    t = min(a.grid[-1], b.grid[-1])
    return float(a(t) - b(t))


def convergence_study(
        preset: ModelPreset,
        clock: ClockSpec,
        steps: Sequence[float],
        n_paths: int,
        seed: int,
        *,
        reference: Reference = "closed_form",
) -> ConvergenceTable:
    """
    RMS over paths of ``|X_euler(T) - X_ref(T)|`` for every step.

    Euler and the reference share the driver of each path. The slope is the
    least-squares fit of ``log error`` on ``log step``.

    Parameters
    ----------
    reference
        ``closed_form`` compares with the preset's explicit solution,
        ``duality`` with the composed classical solution (no ``dt`` term).
    """
    ladder = sorted({float(h) for h in steps}, reverse=True)
    if len(ladder) < 2 or ladder[-1] <= 0:
        msg = "a convergence study needs at least two distinct positive steps"
        raise ConfigurationError(msg, key="steps")
    if n_paths < 1:
        msg = f"n_paths must be positive, got {n_paths}"
        raise ConfigurationError(msg, key="n_paths")
    spec = preset.sde_spec()

    def gap(driver: DrivingTriple) -> float:
        euler = solve_euler(spec, driver).path
        if reference == "duality":
            other = solve_duality(spec, driver).path
        else:
            other = preset_solution(preset, driver)
        return _terminal_gap(euler, other)

    errors = []
    for h in ladder:
        gaps = ensemble_map(gap, clock.with_step(h), n_paths, seed)[:, 0]
        errors.append(math.sqrt(float(np.mean(gaps**2))))
        logger.debug("step %g: strong error %.4e", h, errors[-1])

    slope, _ = np.polyfit(np.log(ladder), np.log(errors), 1)
    logger.info(
        "convergence of %s against %s: slope %.3f", preset.name, reference, slope
    )
    return ConvergenceTable(
        preset=preset.name,
        reference=reference,
        steps=tuple(ladder),
        errors=tuple(errors),
        slope=float(slope),
        n_paths=n_paths,
        seed=seed,
    )
