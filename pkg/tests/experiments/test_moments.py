from __future__ import annotations

import math

import numpy as np
import pytest
import scipy.special

import lumaca as lm
from lumaca.closed_form import ModelPreset
from lumaca.exceptions import ConfigurationError, DualityUnsupportedError
from lumaca.experiments import (
    check_mean_homogeneous,
    check_mittag_leffler,
    check_ou_mean,
    check_variance_homogeneous,
    clock_increments,
    convergence_study,
    ensemble_map,
    mean_clock_curve,
    ou_mean_ode,
    target_clock_sample,
    trend_table,
)
from lumaca.special_fn import gamma_fn
from lumaca.timechange import ClockSpec

# far enough in the tail that a fixed seed cannot plausibly cross it
Z_LIMIT = 4.5


@pytest.fixture
def identity():
    return ClockSpec("identity", step=2**-8, horizon=1.0)


@pytest.fixture
def stable():
    return ClockSpec("inverse_stable", step=2**-8, horizon=1.0, beta=0.6)


# ------- ensembles

def test_ensemble_rows_do_not_depend_on_batching(stable):
    def row(d):
        return [d.e0, float(d.pair.e(1.0))]

    a = ensemble_map(row, stable, 7, seed=5)
    with lm.Config(batch_size=2, threads=3):
        b = ensemble_map(row, stable, 7, seed=5)
    assert a.shape == (7, 2)
    np.testing.assert_array_equal(a, b)


def test_identity_clock_targets(identity):
    np.testing.assert_allclose(
        clock_increments(identity, [0.25, 1.0], 3, seed=0), [[0.25, 1.0]] * 3
    )
    np.testing.assert_array_equal(target_clock_sample(identity, 0.5, 4, seed=0), 0.5)
    grid = np.linspace(0.0, 1.0, 5)
    np.testing.assert_array_equal(mean_clock_curve(identity, grid, 4, seed=0), grid)
    with pytest.raises(ConfigurationError):
        target_clock_sample(identity, 2.0, 4, seed=0)


def test_scaled_clock_target_draws_the_rate():
    clock = ClockSpec("scaled", step=0.1, horizon=1.0, scale_low=0.5, scale_high=2.0)
    v = target_clock_sample(clock, 0.5, 50, seed=1)
    assert np.all((v >= 0.25) & (v <= 1.0))
    assert np.unique(v).size == 50


def test_stable_mean_clock_curve(stable):
    grid = np.array([0.0, 0.25, 1.0])
    curve = mean_clock_curve(stable, grid, 10_000, seed=3)
    assert curve[0] == 0.0
    expected = grid[1:] ** 0.6 / gamma_fn(1.6)
    np.testing.assert_allclose(curve[1:], expected, rtol=0.05)


# ------- moments

def test_mean_on_the_identity_clock(identity):
    check = check_mean_homogeneous(0.05, 0.1, 0.3, identity, 1.0, 200, seed=11)
    assert check.target == pytest.approx(math.exp(0.15), rel=1e-12)
    assert check.target_std_error == 0.0
    assert check.target_provenance == "closed_form"
    assert abs(check.z_score) < Z_LIMIT
    assert check.details["lower_bound"] == pytest.approx(math.exp(0.05))


def test_mean_on_a_stable_clock_reports_mittag_leffler(stable):
    check = check_mean_homogeneous(0.0, -1.0, 0.2, stable, 1.0, 200, seed=2)
    assert check.target_provenance == "quadrature"
    assert check.target_std_error > 0
    assert abs(check.combined_z) < Z_LIMIT
    # the quadrature target and the Mittag-Leffler value agree up to MC error
    assert check.details["mittag_leffler_relative_gap"] < 0.1
    assert "lower_bound" not in check.details


def test_mittag_leffler_mean():
    check = check_mittag_leffler(1.0, 0.5, 1.0, 200, seed=8)
    assert check.target == pytest.approx(scipy.special.erfcx(1.0), rel=1e-10)
    assert check.details["erfc_identity"] == pytest.approx(check.target, rel=1e-10)
    assert abs(check.z_score) < Z_LIMIT
    assert abs(check.details["full_solution_z"]) < Z_LIMIT
    with pytest.raises(ConfigurationError):
        check_mittag_leffler(0.0, 0.5, 1.0, 200, seed=8)


def test_ou_mean_ode_on_a_linear_clock():
    grid = np.linspace(0.0, 1.0, 1025)
    m = ou_mean_ode(2.0, 0.5, 1.0, grid, grid)
    expected = math.exp(-2.0) + 0.25 * (1.0 - math.exp(-2.0))
    assert m == pytest.approx(expected, rel=1e-5)


def test_ou_mean_on_the_identity_clock(identity):
    check = check_ou_mean(1.0, 0.5, 0.3, identity, 1.0, 200, seed=4)
    expected = math.exp(-1.0) + 0.5 * (1.0 - math.exp(-1.0))
    assert check.target == pytest.approx(expected, rel=1e-12)
    assert check.details["ode_target"] == pytest.approx(expected, abs=1e-4)
    assert abs(check.z_score) < Z_LIMIT


def test_ou_mean_on_a_stable_clock(stable):
    check = check_ou_mean(1.0, 0.5, 0.3, stable, 1.0, 200, seed=6)
    assert check.target_provenance == "quadrature"
    assert abs(check.combined_z) < Z_LIMIT
    assert abs(check.details["fractional_gap_z"]) < Z_LIMIT
    assert check.details["ode_target"] == pytest.approx(check.target, abs=0.1)


def test_variance_on_the_identity_clock(identity):
    check = check_variance_homogeneous(0.0, 0.1, 0.3, identity, 1.0, 400, seed=9)
    assert check.target == pytest.approx(math.exp(0.2) * math.expm1(0.09), rel=1e-12)
    assert check.target_std_error == 0.0
    assert abs(check.z_score) < Z_LIMIT


# ------- convergence and trends

def test_convergence_against_the_closed_form(identity):
    table = convergence_study(
        ModelPreset("black_scholes"), identity, [2**-4, 2**-8, 2**-6], 20, seed=1
    )
    assert table.steps == (2**-4, 2**-6, 2**-8)
    assert table.errors[-1] < table.errors[0]
    assert table.slope > 0.2
    assert table.to_frame().columns == ["step", "strong_error"]
    assert table.to_dict()["preset"] == "black_scholes"


def test_convergence_validation(identity):
    preset = ModelPreset("black_scholes")
    with pytest.raises(ConfigurationError):
        convergence_study(preset, identity, [0.1], 10, seed=0)
    with pytest.raises(ConfigurationError):
        convergence_study(preset, identity, [0.1, 0.01], 0, seed=0)
    with pytest.raises(DualityUnsupportedError):
        convergence_study(preset, identity, [0.1, 0.01], 2, seed=0, reference="duality")


def test_trend_table(identity):
    table = trend_table(ModelPreset("ornstein_uhlenbeck"), identity, [1.0, 0.5], 50, seed=2)
    assert table.columns == ["t", "mean", "std_error", "q05", "q50", "q95"]
    assert table["t"].to_list() == [0.5, 1.0]
    assert (table["q05"] <= table["q50"]).all()
    assert (table["q50"] <= table["q95"]).all()
    with pytest.raises(ConfigurationError):
        trend_table(ModelPreset("ornstein_uhlenbeck"), identity, [], 50, seed=2)
