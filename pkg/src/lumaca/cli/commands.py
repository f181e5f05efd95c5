"""
Command runners.

Every runner takes the validated settings and an artifact writer, writes
its artifacts and returns the named checks it evaluated. The exit status of
the command line is derived from those checks only.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any

import numpy as np
import polars as pl

from lumaca.closed_form.coeffs import LinearCoeffs
from lumaca.closed_form.linear import general_linear_solution
from lumaca.closed_form.presets import ModelPreset, preset_solution
from lumaca.closed_form.reduction import reduce_and_solve
from lumaca.exceptions import ConfigurationError, DualityUnsupportedError
from lumaca.experiments.convergence import convergence_study
from lumaca.experiments.ensemble import ensemble_map
from lumaca.experiments.estimates import mc_estimate
from lumaca.experiments.moments import (
    check_matrix,
    check_mean_homogeneous,
    check_mittag_leffler,
    check_ou_mean,
    check_variance_homogeneous,
)
from lumaca.experiments.trends import trend_table
from lumaca.fracpde.compare import compare_densities, subdiffusion_variance_slope
from lumaca.fracpde.monte_carlo import mc_density
from lumaca.fracpde.problem import FracPdeProblem
from lumaca.fracpde.solver import DRIFT_TOLERANCE, solve_caputo_fpe
from lumaca.path_calculus.fixtures import brownian_path, indicator_path
from lumaca.path_calculus.verifiers import (
    ItoIntegrands,
    calculus_rules,
    verify_first_cov,
    verify_qv_composition,
    verify_second_cov,
    verify_tc_ito,
)
from lumaca.sde_engine.driver import make_driver
from lumaca.sde_engine.duality import duality_residual, solve_duality
from lumaca.sde_engine.euler import solve_euler
from lumaca.sde_engine.spec import SdeSpec
from lumaca.special_fn.fractional import fractional_integral
from lumaca.special_fn.gamma import gamma_fn
from lumaca.special_fn.mittag_leffler import (
    MittagLefflerParams,
    mittag_leffler_with_error,
)
from lumaca.timechange.clocks import step_time_change
from lumaca.timechange.inverse import TimeChangePair
from lumaca.timechange.paths import uniform_grid
from lumaca.utils.parallel import map_batches
from lumaca.utils.random import Stream

if TYPE_CHECKING:
    from collections.abc import Callable, Mapping

    from lumaca.cli.settings import RunSettings
    from lumaca.experiments.estimates import MomentCheck
    from lumaca.path_calculus.cadlag import CadlagPath
    from lumaca.sde_engine.driver import DrivingTriple
    from lumaca.shared.io import ArtifactWriter
    from lumaca.typing import FloatArray, ScalarFunction

logger = logging.getLogger(__name__)

__all__ = ["RUNNERS", "CheckRow", "CommandResult", "ito_function"]


@dataclass(frozen=True)
class CheckRow:
    """One configured assertion and its outcome."""

    name: str
    value: float
    threshold: float | None
    passed: bool
    note: str = ""

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "value": self.value,
            "threshold": self.threshold,
            "passed": self.passed,
            "note": self.note,
        }


@dataclass
class CommandResult:
    command: str
    rows: list[CheckRow] = field(default_factory=list)
    report: dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    @property
    def failed(self) -> list[str]:
        return [r.name for r in self.rows if not r.passed]

    def to_dict(self) -> dict[str, Any]:
        return {
            "command": self.command,
            "passed": self.passed,
            "failed": self.failed,
            "checks": [r.to_dict() for r in self.rows],
            **self.report,
        }


def _at_most(name: str, value: float, threshold: float, note: str = "") -> CheckRow:
    return CheckRow(name, float(value), threshold, bool(value <= threshold), note)


# ---------------------------------------------------------------------- models


def _sde_spec(model: ModelPreset | LinearCoeffs) -> SdeSpec:
    if isinstance(model, ModelPreset):
        return model.sde_spec()
    return SdeSpec.from_linear(model)


def _require_preset(model: ModelPreset | LinearCoeffs, command: str) -> ModelPreset:
    if not isinstance(model, ModelPreset):
        msg = f"{command} needs a named preset, not linear coefficients"
        raise ConfigurationError(msg, section="model", key="preset")
    return model


def _solver(
        settings: RunSettings,
        model: ModelPreset | LinearCoeffs,
) -> Callable[[DrivingTriple], CadlagPath]:
    scheme = settings.section("simulate")["scheme"]
    spec = _sde_spec(model)
    match scheme:
        case "euler":
            return lambda d: solve_euler(spec, d).path
        case "duality":
            if spec.has_dt_term:
                msg = "the duality scheme needs a model without a dt term"
                raise ConfigurationError(msg, section="simulate", key="scheme")
            return lambda d: solve_duality(spec, d).path
        case "closed_form":
            if isinstance(model, ModelPreset):
                return lambda d: preset_solution(model, d)
            return lambda d: general_linear_solution(model, d)
        case "reduction":
            return lambda d: reduce_and_solve(spec, d)
    msg = f"unknown scheme {scheme!r}; choose euler, duality, closed_form or reduction"
    raise ConfigurationError(msg, section="simulate", key="scheme")


# ---------------------------------------------------------------------- simulate


def run_simulate(settings: RunSettings, writer: ArtifactWriter) -> CommandResult:
    """Solve the configured model on an ensemble and summarize ``X_T``."""
    clock = settings.clock()
    model = settings.model()
    solve = _solver(settings, model)
    n, seed = settings.n_paths, settings.seed
    save = min(int(settings.section("simulate")["save_paths"]), n)

    for i in range(save):
        path = solve(make_driver(clock.build(seed, i), seed, i))
        writer.write_csv(f"paths/path_{i:05d}.csv", path.to_frame())

    terminal = ensemble_map(lambda d: solve(d).values[-1], clock, n, seed)[:, 0]
    estimate = mc_estimate(terminal, seed) if n > 1 else None
    logger.info("simulated %d paths of %s", n, model_name(model))
    return CommandResult(
        command="simulate",
        report={
            "model": _model_dict(model),
            "clock": clock.to_dict(),
            "scheme": settings.section("simulate")["scheme"],
            "terminal": None if estimate is None else estimate.to_dict(),
            "saved_paths": save,
        },
    )


def model_name(model: ModelPreset | LinearCoeffs) -> str:
    return model.name if isinstance(model, ModelPreset) else "linear"


def _model_dict(model: ModelPreset | LinearCoeffs) -> dict[str, Any]:
    if isinstance(model, ModelPreset):
        return model.to_dict()
    return {"name": "linear"}


# ---------------------------------------------------------------------- verify


def ito_function(name: str) -> tuple[ScalarFunction, ScalarFunction, ScalarFunction]:
    """``(f, f', f'')`` of a test function of the Ito check."""
    match name:
        case "x":
            return (lambda x: x, np.ones_like, np.zeros_like)
        case "x2":
            return (np.square, lambda x: 2.0 * x, lambda x: 2.0 * np.ones_like(x))
        case "exp":
            return (np.exp, np.exp, np.exp)
        case "sin":
            return (np.sin, np.cos, lambda x: -np.sin(x))
    msg = f"unknown function {name!r}; choose x, x2, exp or sin"
    raise ConfigurationError(msg, section="verify", key="function")


_DRIVER_CHECKS = ("first_cov", "second_cov", "qv", "tc_ito", "calculus_rules", "duality")


def _driver_residuals(
        settings: RunSettings,
        names: tuple[str, ...],
) -> Callable[[DrivingTriple], list[float]]:
    v = settings.section("verify")
    f = ito_function(v["function"])
    integrands = ItoIntegrands(a=v["a"], f=v["f"], g=v["g"])
    spec = None
    if "duality" in names:
        spec = _sde_spec(settings.model())
        if spec.has_dt_term:
            msg = "the duality check needs a model without a dt term"
            raise ConfigurationError(msg, section="model", key="preset")

    def residuals(driver: DrivingTriple) -> list[float]:
        z = driver.inner_b
        assert z is not None
        pair = driver.pair
        out = []
        for name in names:
            match name:
                case "first_cov":
                    out.append(verify_first_cov(z, z, pair).sup)
                case "second_cov":
                    k = indicator_path(pair.e.grid, 0.0, v["indicator_end"], "both")
                    out.append(verify_second_cov(k, z, pair).sup)
                case "qv":
                    out.append(verify_qv_composition(z, pair).sup)
                case "tc_ito":
                    out.append(verify_tc_ito(integrands, z, pair, *f).rms)
                case "calculus_rules":
                    out.append(calculus_rules(driver).be_be_minus_e)
                case "duality":
                    assert spec is not None
                    try:
                        solution = solve_duality(spec, driver)
                        out.append(duality_residual(spec, solution, driver).rms)
                    except DualityUnsupportedError as err:
                        raise ConfigurationError(str(err), section="model") from err
        return out

    return residuals


def step_fixture_residuals(
        at: float,
        step: float,
        n_paths: int,
        seed: int,
) -> FloatArray:
    """
    ``sup |[B o T, B o T] - [B, B] o T|`` for the unsynchronized clock
    ``T = 1_{[at, inf)}``, one Brownian path per index.

    At ``t >= at`` the residual is ``|B_1**2 - [B, B]_1|``, which stays away
    from zero under refinement.
    """
    e = step_time_change(at, step, max(at, 1.0))
    pair = TimeChangePair.from_time_change(e, step)
    inner = uniform_grid(step, float(e.values[-1]))

    def run(batch: range) -> FloatArray:
        return np.asarray([
            verify_qv_composition(
                brownian_path(inner, seed, i, stream=Stream.FIXTURE), pair
            ).sup
            for i in batch
        ])

    return np.concatenate(map_batches(run, n_paths))


def run_verify(settings: RunSettings, writer: ArtifactWriter) -> CommandResult:
    """
    Pathwise identities over an ensemble of drivers.

    A residual check passes when its mean over paths is at most
    ``threshold``. The step fixture is a negative check: it passes when at
    least ``negative_fraction`` of the paths exceed ``negative_threshold``.
    """
    v = settings.section("verify")
    checks = tuple(v["checks"])
    unknown = set(checks) - {*_DRIVER_CHECKS, "step_fixture"}
    if unknown:
        msg = f"unknown check(s) {sorted(unknown)}"
        raise ConfigurationError(msg, section="verify", key="checks")
    n, seed = settings.n_paths, settings.seed
    threshold = float(v["threshold"])
    rows: list[CheckRow] = []
    table: dict[str, FloatArray] = {"index": np.arange(n, dtype=np.float64)}

    names = tuple(c for c in checks if c in _DRIVER_CHECKS)
    if names:
        clock = settings.clock()
        values = ensemble_map(_driver_residuals(settings, names), clock, n, seed)
        for j, name in enumerate(names):
            table[name] = values[:, j]
            rows.append(_at_most(name, float(values[:, j].mean()), threshold, "mean"))

    if "step_fixture" in checks:
        res = step_fixture_residuals(v["step_at"], settings.clock().step, n, seed)
        table["step_fixture"] = res
        fraction = float(np.mean(res > v["negative_threshold"]))
        rows.append(
            CheckRow(
                "step_fixture",
                fraction,
                float(v["negative_fraction"]),
                fraction >= v["negative_fraction"],
                f"fraction of residuals above {v['negative_threshold']:g}",
            )
        )

    writer.write_csv("residuals.csv", pl.DataFrame(table))
    return CommandResult(command="verify", rows=rows, report={"n_paths": n, "seed": seed})


# ---------------------------------------------------------------------- moments


def run_moments(settings: RunSettings, writer: ArtifactWriter) -> CommandResult:
    """The moment matrix under the configured clock."""
    m = settings.section("moments")
    clock = settings.clock()
    n, seed = settings.n_paths, settings.seed
    t, threshold = float(m["t"]), float(m["threshold"])
    checks: list[MomentCheck] = []

    for name in m["checks"]:
        match name:
            case "mittag_leffler":
                if clock.kind != "inverse_stable" or clock.beta is None:
                    msg = "the mittag_leffler check needs an inverse_stable clock"
                    raise ConfigurationError(msg, section="clock", key="kind")
                checks.append(
                    check_mittag_leffler(
                        m["lam"], clock.beta, t, n, seed,
                        rho=m["rho"], sigma=m["sigma"], x0=m["x0"],
                        step=clock.step, threshold=threshold,
                    )
                )
            case "ou_mean":
                checks.append(
                    check_ou_mean(
                        m["alpha"], m["ou_mu"], m["sigma"], clock, t, n, seed,
                        x0=m["x0"], threshold=threshold,
                    )
                )
            case "mean_homogeneous":
                checks.append(
                    check_mean_homogeneous(
                        m["rho"], m["mu"], m["sigma"], clock, t, n, seed,
                        x0=m["x0"], threshold=threshold,
                    )
                )
            case "variance_homogeneous":
                checks.append(
                    check_variance_homogeneous(
                        m["rho"], m["mu"], m["sigma"], clock, t, n, seed,
                        x0=m["x0"], threshold=threshold,
                    )
                )
            case _:
                msg = f"unknown moment check {name!r}"
                raise ConfigurationError(msg, section="moments", key="checks")

    verdict = check_matrix(checks, threshold, m["allowance"])
    rows = [
        CheckRow(c.name, c.combined_z, threshold, c.passed, c.target_provenance)
        for c in checks
    ]
    rows.append(
        CheckRow("matrix", float(verdict.n_failed), float(verdict.allowed), verdict.passed)
    )
    if m["trend_times"]:
        preset = _require_preset(settings.model(), "a trend table")
        writer.write_csv("trends.csv", trend_table(preset, clock, m["trend_times"], n, seed))

    return CommandResult(
        command="moments",
        rows=rows,
        report={
            "clock": clock.to_dict(),
            "moments": [c.to_dict() for c in checks],
            "matrix": verdict.to_dict(),
        },
    )


# ---------------------------------------------------------------------- converge


def run_converge(settings: RunSettings, writer: ArtifactWriter) -> CommandResult:
    """Strong error of Euler over a ladder of steps."""
    c = settings.section("converge")
    preset = _require_preset(settings.model(), "a convergence study")
    if c["reference"] not in ("closed_form", "duality"):
        msg = f"reference must be closed_form or duality, got {c['reference']!r}"
        raise ConfigurationError(msg, section="converge", key="reference")
    table = convergence_study(
        preset,
        settings.clock(),
        c["steps"],
        settings.n_paths,
        settings.seed,
        reference=c["reference"],
    )
    writer.write_csv("convergence.csv", table.to_frame())

    rows = []
    low, high = c["min_slope"], c["max_slope"]
    if low is not None:
        rows.append(CheckRow("min_slope", table.slope, low, table.slope >= low))
    if high is not None:
        rows.append(CheckRow("max_slope", table.slope, high, table.slope <= high))
    if c["require_monotone"]:
        rows.append(CheckRow("monotone", float(table.is_monotone), 1.0, table.is_monotone))
    return CommandResult(command="converge", rows=rows, report={"convergence": table.to_dict()})


# ---------------------------------------------------------------------- fracpde


def run_fracpde(settings: RunSettings, writer: ArtifactWriter) -> CommandResult:
    """Fractional Fokker-Planck density against a Monte-Carlo histogram."""
    f = settings.section("fracpde")
    mu, sigma = float(f["mu"]), float(f["sigma"])
    problem = FracPdeProblem(
        beta=f["beta"],
        mu_fn=lambda y: mu,
        sigma_fn=lambda y: sigma,
        x_init=f["x_init"],
        t_final=f["t_final"],
        nt=f["nt"],
        ny=f["ny"],
        snapshot_times=tuple(f["snapshot_times"]),
    )
    result = solve_caputo_fpe(problem)
    for grid in result.snapshots:
        writer.write_csv(f"densities/pde_t{grid.time:g}.csv", grid.to_frame())

    spec = SdeSpec(
        mu=lambda t, u, x: np.full(np.shape(x), mu),
        sigma=lambda t, u, x: np.full(np.shape(x), sigma),
        x0=f["x_init"],
        name="fracpde",
    )
    mc = mc_density(
        spec,
        f["beta"],
        f["mc_paths"],
        f["t_final"],
        f["bins"],
        settings.seed,
        y_domain=result.domain,
        substeps=f["substeps"],
    )
    writer.write_csv(f"densities/mc_t{mc.time:g}.csv", mc.to_frame())
    comparison = compare_densities(result.final, mc)

    rows = [_at_most("mass_drift", result.mass_drift, DRIFT_TOLERANCE)]
    if f["max_l1"] is not None:
        rows.append(_at_most("l1", comparison.l1, f["max_l1"]))
    report: dict[str, Any] = {
        "pde": result.to_dict(),
        "mc": mc.to_dict(),
        "comparison": comparison.to_dict(),
    }
    if len(result.snapshots) >= 2:
        report["variance_slope"] = subdiffusion_variance_slope(result)
    return CommandResult(command="fracpde", rows=rows, report=report)


# ---------------------------------------------------------------------- special


def run_special(
        settings: RunSettings,
        writer: ArtifactWriter,  # noqa: ARG001
) -> CommandResult:
    """Evaluate one special function, optionally against an expected value."""
    s = settings.section("special")
    report: dict[str, Any] = {"function": s["function"]}
    match s["function"]:
        case "mittag_leffler":
            value, achieved, branch = mittag_leffler_with_error(
                MittagLefflerParams(beta=s["beta"], z=s["z"])
            )
            report.update(beta=s["beta"], z=s["z"], achieved=achieved, branch=branch)
        case "gamma":
            value = gamma_fn(s["x"])
            report.update(x=s["x"])
        case "fractional_integral":
            value = fractional_integral(np.ones_like, s["beta"], s["t"])
            report.update(beta=s["beta"], t=s["t"], integrand="1")
        case other:
            msg = f"unknown function {other!r}; choose mittag_leffler, gamma or fractional_integral"
            raise ConfigurationError(msg, section="special", key="function")
    report["value"] = value

    rows = []
    if s["expected"] is not None:
        expected = float(s["expected"])
        rel = abs(value - expected) / max(abs(expected), np.finfo(float).tiny)
        rows.append(_at_most("relative_error", rel, s["rtol"], f"expected {expected!r}"))
    return CommandResult(command="special", rows=rows, report=report)


RUNNERS: Mapping[str, Callable[[RunSettings, ArtifactWriter], CommandResult]] = {
    "simulate": run_simulate,
    "verify": run_verify,
    "moments": run_moments,
    "converge": run_converge,
    "fracpde": run_fracpde,
    "special": run_special,
}
