from __future__ import annotations

import math

import numpy as np
import pytest
from scipy.integrate import trapezoid

from lumaca.closed_form import ModelPreset
from lumaca.exceptions import ConfigurationError, DualityUnsupportedError
from lumaca.fracpde import (
    DensityGrid,
    FracPdeProblem,
    compare_densities,
    density_moments,
    heat_kernel,
    l1_weights,
    mc_density,
    mc_samples,
    solve_caputo_fpe,
    subdiffusion_variance_slope,
)
from lumaca.sde_engine import SdeSpec
from lumaca.special_fn import gamma_fn
from lumaca.timechange.laws import sample_clock_exact


def _constant(value):
    return lambda y: np.full_like(y, value)


def _problem(beta=0.5, mu=0.0, sigma=1.0, **kwargs):
    return FracPdeProblem(beta=beta, mu_fn=_constant(mu), sigma_fn=_constant(sigma), **kwargs)


def _spec(mu=0.0, sigma=1.0, x0=0.0):
    return SdeSpec(
        mu=lambda t, u, x: np.full_like(x, mu),
        sigma=lambda t, u, x: np.full_like(x, sigma),
        x0=x0,
    )


@pytest.fixture(scope="module")
def diffusion():
    return solve_caputo_fpe(_problem(snapshot_times=(0.125, 0.25, 0.5, 1.0)))


# ------- problems

@pytest.mark.parametrize(
    "kwargs",
    [
        {"beta": 1.0},
        {"beta": 0.0},
        {"t_final": 0.0},
        {"nt": 32},
        {"ny": 10},
        {"x_init": 3.0, "y_domain": (-1.0, 1.0)},
        {"snapshot_times": (2.0,)},
    ],
)
def test_problem_validation(kwargs):
    with pytest.raises(ConfigurationError):
        _problem(**kwargs)


def test_domain_resolution():
    (low, high), widened = _problem(x_init=1.0).resolve_domain()
    assert widened
    assert low == pytest.approx(1.0 - 8.0)
    assert high == pytest.approx(1.0 + 8.0)

    (low, high), widened = _problem(y_domain=(-1.0, 1.0)).resolve_domain()
    assert widened
    assert (low, high) == (pytest.approx(-8.0), pytest.approx(8.0))

    assert _problem(y_domain=(-20.0, 20.0)).resolve_domain() == ((-20.0, 20.0), False)

    # drift displaces the support
    (low, high), _ = _problem(mu=2.0).resolve_domain()
    assert high == pytest.approx(8.0 + 2.0)


def test_l1_weights():
    b = l1_weights(0.4, 50)
    assert b[0] == 1.0
    assert np.all(np.diff(b) < 0)
    assert b.sum() == pytest.approx(50**0.6)


# ------- solver

def test_mass_is_conserved(diffusion):
    assert diffusion.mass_drift < 1e-8
    assert diffusion.clipped_mass == 0.0
    assert not diffusion.warnings
    for snap in diffusion.snapshots:
        assert snap.total_mass == pytest.approx(1.0, abs=1e-8)


def test_variance_grows_like_a_power_of_time(diffusion):
    v0 = density_moments(diffusion.initial)["variance"]
    for snap in diffusion.snapshots[1:]:
        moments = density_moments(snap)
        assert moments["mean"] == pytest.approx(0.0, abs=1e-8)
        expected = v0 + snap.time**0.5 / gamma_fn(1.5)
        assert moments["variance"] == pytest.approx(expected, rel=0.02)
    assert subdiffusion_variance_slope(diffusion) == pytest.approx(0.5, abs=0.05)


def test_snapshots_are_on_the_time_grid(diffusion):
    assert [s.time for s in diffusion.snapshots] == [0.125, 0.25, 0.5, 1.0]
    assert diffusion.at(0.3).time == 0.25
    assert diffusion.final.time == 1.0
    assert len(diffusion) == 4
    assert diffusion.widened


def test_drift_moves_the_mean():
    result = solve_caputo_fpe(_problem(beta=0.7, mu=0.5, nt=128))
    mean = density_moments(result.final)["mean"]
    assert mean == pytest.approx(0.5 / gamma_fn(1.7), abs=0.02)


def test_solver_rejects_a_vanishing_diffusion():
    prob = FracPdeProblem(
        beta=0.5,
        mu_fn=_constant(0.0),
        sigma_fn=lambda y: np.where(np.abs(y) < 1.0, 0.0, 1.0),
    )
    with pytest.raises(ConfigurationError):
        solve_caputo_fpe(prob)


def test_near_one_beta_meets_the_heat_kernel():
    final = solve_caputo_fpe(_problem(beta=0.999)).final
    kernel = DensityGrid(final.y, heat_kernel(final.y, 1.0), 1.0)
    assert compare_densities(final, kernel).l1 < 0.01


def test_slope_needs_two_snapshots():
    result = solve_caputo_fpe(_problem(nt=64, ny=64))
    with pytest.raises(ConfigurationError):
        subdiffusion_variance_slope(result)


# ------- monte carlo

@pytest.mark.slow
def test_monte_carlo_density_matches_the_solver(diffusion):
    final = diffusion.final
    mc = mc_density(
        _spec(),
        0.5,
        40_000,
        1.0,
        bins=80,
        seed=3,
        y_domain=diffusion.domain,
        substeps=16,
    )
    assert mc.total_mass == pytest.approx(1.0, abs=1e-3)
    assert compare_densities(final, mc).l1 < 0.1


@pytest.mark.slow
def test_near_one_beta_monte_carlo_meets_the_heat_kernel():
    mc = mc_density(
        _spec(), 0.999, 40_000, 1.0, bins=80, seed=7, y_domain=(-8.0, 8.0), substeps=4
    )
    kernel = DensityGrid(mc.y, heat_kernel(mc.y, 1.0), 1.0)
    assert compare_densities(mc, kernel).l1 < 0.06


def test_pure_drift_samples_follow_the_clock():
    drift = _spec(mu=1.0, sigma=0.0, x0=2.0)
    x = mc_samples(drift, 0.5, 20_000, 1.0, seed=4)
    clock = sample_clock_exact(0.5, [1.0], 20_000, 4)[:, 0]
    np.testing.assert_allclose(x, 2.0 + clock, rtol=1e-12)

    edges = np.linspace(2.0, 6.0, 41)
    mc = mc_density(drift, 0.5, 20_000, 1.0, bins=edges, seed=4)
    expected = DensityGrid.from_samples(2.0 + clock, edges, 1.0)
    np.testing.assert_allclose(mc.masses, expected.masses)


def test_exact_samples_have_the_right_moments():
    x = mc_samples(_spec(mu=0.3, sigma=0.5, x0=1.0), 0.5, 20_000, 1.0, seed=1)
    mean_e = 1.0 / gamma_fn(1.5)
    assert x.mean() == pytest.approx(1.0 + 0.3 * mean_e, abs=0.03)
    assert x.size == 20_000


def test_monte_carlo_validation():
    with pytest.raises(DualityUnsupportedError):
        mc_samples(ModelPreset("black_scholes").sde_spec(), 0.5, 20_000, 1.0, seed=0)
    with pytest.raises(ConfigurationError):
        mc_samples(_spec(), 0.5, 100, 1.0, seed=0)
    with pytest.raises(ConfigurationError):
        mc_samples(_spec(), 0.5, 20_000, 1.0, seed=0, method="other")


# ------- densities

def test_density_grid_from_samples():
    samples = np.array([0.1, 0.2, 0.6, 5.0])
    grid = DensityGrid.from_samples(samples, np.linspace(0.0, 1.0, 3), 1.0)
    np.testing.assert_allclose(grid.y, [0.25, 0.75])
    # the sample outside the edges still counts in the normalization
    assert grid.total_mass == pytest.approx(0.75)
    assert grid.to_frame().columns == ["y", "mass"]


def test_density_grid_validation():
    with pytest.raises(ConfigurationError):
        DensityGrid(np.array([0.0, 1.0]), np.array([1.0, -1.0]), 0.0)
    with pytest.raises(ConfigurationError):
        DensityGrid(np.array([1.0, 0.0]), np.array([1.0, 1.0]), 0.0)


def test_compare_densities():
    y = np.linspace(-6.0, 6.0, 601)
    a = DensityGrid(y, heat_kernel(y, 1.0), 1.0)
    same = compare_densities(a, a)
    assert same.l1 == 0.0
    assert same.ks == 0.0
    shifted = DensityGrid(y, heat_kernel(y, 1.0, x0=0.5), 1.0)
    diff = compare_densities(a, shifted)
    # L1 distance of two unit gaussians half a unit apart
    assert diff.l1 == pytest.approx(2.0 * (2.0 * 0.5987063256829237 - 1.0), rel=1e-3)
    coarse = DensityGrid(y[::4], heat_kernel(y[::4], 1.0), 1.0)
    assert compare_densities(a, coarse).l1 < 2e-3


def test_heat_kernel():
    y = np.linspace(-10.0, 10.0, 2001)
    assert trapezoid(heat_kernel(y, 2.0, sigma=0.5), y) == pytest.approx(1.0)
    with pytest.raises(ConfigurationError):
        heat_kernel(y, 0.0)
