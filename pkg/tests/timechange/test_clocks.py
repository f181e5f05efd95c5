from __future__ import annotations

import math

import numpy as np
import polars as pl
import pytest

from lumaca.exceptions import ConfigurationError
from lumaca.timechange import (
    ClockSpec,
    MonotonePath,
    bridge_pair,
    identity_pair,
    inverse_stable_pair,
    read_time_change,
    scaled_pair,
    step_time_change,
    uniform_grid,
    user_path_pair,
)


# ------- deterministic clocks

def test_identity_pair():
    pair = identity_pair(0.01, 1.0)
    assert pair.is_double
    np.testing.assert_allclose(pair.e.values, pair.e.grid, atol=1e-12)
    assert pair.horizon == 1.0


def test_scaled_pair_runs_at_its_rate():
    pair = scaled_pair(2.0, 0.01, 1.0)
    assert pair.is_double
    np.testing.assert_allclose(pair.e.values, 2.0 * pair.e.grid, atol=1e-9)


def test_scaled_pair_rejects_nonpositive_rates():
    with pytest.raises(ConfigurationError):
        scaled_pair(0.0, 0.01, 1.0)


def test_step_time_change_values():
    e = step_time_change(1.0, 0.1, 2.0)
    assert e(0.9) == 0.0
    assert e(1.0) == 1.0
    assert e(2.0) == 1.0
    with pytest.raises(ConfigurationError):
        step_time_change(3.0, 0.1, 2.0)


# ------- random clocks

def test_inverse_stable_pair_starts_one_inner_step_up():
    step = 1e-3
    pair = inverse_stable_pair(0.5, step, 1.0, seed=1)
    assert pair.is_double
    assert pair.e.grid[-1] == 1.0
    assert pair.e.values[0] == pytest.approx(step)
    assert np.all(np.diff(pair.e.values) >= 0)


def test_bridge_pair_reaches_one_at_the_end():
    pair = bridge_pair(0.5, 1e-3, seed=2)
    assert pair.e.grid[-1] == 1.0
    assert pair.e.values[-1] == pytest.approx(1.0)


def test_user_path_pair_of_a_continuous_clock_is_double():
    g = uniform_grid(0.01, 1.0)
    e = MonotonePath(g, g**2, "linear")
    pair = user_path_pair(e, 0.005)
    assert pair.is_double
    assert pair.d(0.25) == pytest.approx(0.5, abs=0.02)


def test_read_time_change_round_trip(tmp_path):
    g = uniform_grid(0.1, 1.0)
    path = tmp_path / "clock.csv"
    pl.DataFrame({"t": g, "value": 0.5 * g}).write_csv(path)
    e = read_time_change(path)
    np.testing.assert_allclose(e.values, 0.5 * g)
    assert e.interp == "linear"


def test_read_time_change_errors(tmp_path):
    with pytest.raises(ConfigurationError):
        read_time_change(tmp_path / "missing.csv")
    path = tmp_path / "bad.csv"
    pl.DataFrame({"time": [0.0, 1.0], "value": [0.0, 1.0]}).write_csv(path)
    with pytest.raises(ConfigurationError):
        read_time_change(path)


# ------- clock recipes

@pytest.mark.parametrize(
    "kwargs",
    [
        {"kind": "inverse_stable", "step": 0.01, "horizon": 1.0},
        {"kind": "inverse_stable", "step": 0.01, "horizon": 1.0, "beta": 1.2},
        {"kind": "bridge", "step": 0.01, "horizon": 2.0, "beta": 0.5},
        {"kind": "scaled", "step": 0.01, "horizon": 1.0, "scale_low": 2.0, "scale_high": 1.0},
        {"kind": "user_path", "step": 0.01, "horizon": 1.0},
        {"kind": "sundial", "step": 0.01, "horizon": 1.0},
    ],
)
def test_clock_spec_validation(kwargs):
    with pytest.raises(ConfigurationError):
        ClockSpec(**kwargs)


def test_clock_spec_builds_reproducible_pairs():
    clock = ClockSpec("inverse_stable", step=1e-2, horizon=1.0, beta=0.7)
    a, b = clock.build(5, 3), clock.build(5, 3)
    np.testing.assert_array_equal(a.e.values, b.e.values)
    assert clock.is_random


def test_scaled_clock_draws_within_bounds():
    clock = ClockSpec("scaled", step=0.1, horizon=1.0, scale_low=0.5, scale_high=1.5)
    rates = [clock.draw_rate(1, i) for i in range(200)]
    assert min(rates) >= 0.5
    assert max(rates) <= 1.5
    assert clock.mean_rate == 1.0
    assert clock.build(1, 7).e.values[-1] == pytest.approx(rates[7])


def test_deterministic_scaled_clock_is_not_random():
    clock = ClockSpec("scaled", step=0.1, horizon=1.0, scale_low=2.0, scale_high=2.0)
    assert not clock.is_random
    assert clock.draw_rate(0) == 2.0


def test_with_step_keeps_everything_else():
    clock = ClockSpec("inverse_stable", step=1e-2, horizon=1.0, beta=0.4)
    finer = clock.with_step(1e-3)
    assert finer.step == 1e-3
    assert finer.to_dict() == {**clock.to_dict(), "step": 1e-3}


def test_user_path_clock(tmp_path):
    g = uniform_grid(0.01, 1.0)
    path = tmp_path / "clock.csv"
    pl.DataFrame({"t": g, "value": np.sqrt(g + 1.0) - 1.0}).write_csv(path)
    clock = ClockSpec("user_path", step=0.01, horizon=1.0, path=path)
    pair = clock.build(0)
    assert pair.is_double
    assert pair.e(1.0) == pytest.approx(math.sqrt(2.0) - 1.0)
