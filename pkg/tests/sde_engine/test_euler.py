from __future__ import annotations

import numpy as np
import pytest

import lumaca as lm
from lumaca.closed_form import ModelPreset, preset_solution
from lumaca.exceptions import ConfigurationError, DivergenceError
from lumaca.sde_engine import (
    DriverBatch,
    SdeSpec,
    make_driver,
    make_drivers,
    solve_euler,
    solve_euler_batch,
)
from lumaca.timechange import ClockSpec, identity_pair, inverse_stable_pair

DYADIC = 2.0**-8


def _additive(mu=0.5, sigma=0.3, x0=1.0):
    return SdeSpec(
        mu=lambda t, u, x: np.full_like(x, mu),
        sigma=lambda t, u, x: np.full_like(x, sigma),
        x0=x0,
    )


# ------- sde specs

def test_spec_validation():
    with pytest.raises(ConfigurationError):
        _additive(x0=float("inf"))
    with pytest.raises(ConfigurationError):
        SdeSpec(mu=lambda t, u, x: x, sigma=lambda t, u, x: x, lipschitz_hint=0.0)


def test_lipschitz_hint_is_checked():
    spec = SdeSpec(
        mu=lambda t, u, x: 2.0 * x,
        sigma=lambda t, u, x: 0.5 * x,
        lipschitz_hint=1.0,
    )
    x = np.linspace(-1.0, 1.0, 11)
    with pytest.raises(ConfigurationError):
        spec.check_lipschitz(0.0, 0.0, x)
    ok = SdeSpec(mu=spec.mu, sigma=spec.sigma, lipschitz_hint=2.0)
    assert ok.check_lipschitz(0.0, 0.0, x) == pytest.approx(2.0, rel=1e-6)


def test_spec_from_linear_coefficients():
    bs = ModelPreset("black_scholes").sde_spec()
    assert bs.has_dt_term
    assert bs.noise_factors is not None
    ou = ModelPreset("ornstein_uhlenbeck").sde_spec()
    assert ou.noise_factors is None
    x = np.array([2.0])
    np.testing.assert_allclose(ou.drift(0.0, 0.0, x), [-2.0])
    np.testing.assert_allclose(ou.mu(0.0, 0.0, x), [0.5])

    no_dt = ModelPreset("black_scholes", {"rho": 0.0}).sde_spec()
    assert not no_dt.has_dt_term
    np.testing.assert_array_equal(no_dt.drift(0.0, 0.0, x), [0.0])


# ------- euler

@pytest.mark.parametrize(
    "pair",
    [identity_pair(DYADIC, 1.0), inverse_stable_pair(0.5, 1e-3, 1.0, seed=2)],
    ids=["identity", "inverse_stable"],
)
def test_euler_is_exact_for_constant_coefficients(pair):
    drv = make_driver(pair, seed=2)
    sol = solve_euler(_additive(), drv)
    expected = 1.0 + 0.5 * drv.clock_increments() + 0.3 * drv.b_of_e.values
    np.testing.assert_allclose(sol.path.values, expected, atol=1e-10)
    assert sol.scheme == "euler"
    assert sol.seed == 2


def test_euler_meets_the_closed_form():
    model = ModelPreset("black_scholes")
    spec = model.sde_spec()

    def mean_error(step):
        out = []
        for i in range(20):
            drv = make_driver(inverse_stable_pair(0.7, step, 1.0, seed=5, index=i), 5, i)
            sol = solve_euler(spec, drv)
            exact = preset_solution(model, drv)
            out.append(abs(sol.path.values[-1] - exact.values[-1]))
        return float(np.mean(out))

    fine = mean_error(2.0**-10)
    assert fine < 0.02
    assert fine < mean_error(2.0**-4)


def test_euler_batch_matches_single_paths():
    clock = ClockSpec(kind="inverse_stable", beta=0.6, step=1e-2, horizon=1.0)
    batch = DriverBatch.build(clock, seed=4, indices=range(3))
    spec = ModelPreset("black_scholes").sde_spec()
    states = solve_euler_batch(spec, batch)
    assert states.shape == (3, batch.t.size)
    for row, drv in zip(states, batch.drivers):
        np.testing.assert_allclose(row, solve_euler(spec, drv).path.values, rtol=1e-12)


def test_euler_divergence_is_reported():
    spec = SdeSpec(
        mu=lambda t, u, x: 5.0 * x,
        sigma=lambda t, u, x: np.zeros_like(x),
    )
    drv = make_driver(identity_pair(DYADIC, 1.0), seed=0)
    with lm.Config(divergence_bound=10.0), pytest.raises(DivergenceError) as info:
        solve_euler(spec, drv)
    assert info.value.step_index is not None
    assert 0.0 < info.value.time < 1.0


# ------- drivers

def test_driver_starts_at_zero_noise():
    drv = make_driver(inverse_stable_pair(0.5, 1e-3, 1.0, seed=8), seed=8)
    assert drv.b_of_e.values[0] == 0.0
    assert drv.e0 == pytest.approx(1e-3)
    assert drv.clock_increments()[0] == 0.0
    # the inner grid holds every clock value
    assert np.all(np.isin(drv.e.values, drv.inner_b.grid))


def test_time_changed_noise_variance_is_the_mean_clock():
    n = 2000
    clock = ClockSpec("inverse_stable", step=DYADIC, horizon=1.0, beta=0.5)
    batch = DriverBatch.build(clock, 19, range(n))
    x = batch.b_of_e[:, -1]
    e1 = batch.e[:, -1] - batch.e[:, 0]
    # given the clock, B o E_1 - B o E_0 is N(0, E_1 - E_0)
    gap = x**2 - e1
    assert abs(np.mean(gap)) < 4.5 * np.std(gap, ddof=1) / np.sqrt(n)
    # E[E_1] = 1 / Gamma(1.5)
    assert np.mean(e1) == pytest.approx(1.0 / 0.886226925452758, abs=0.1)
    assert np.var(x, ddof=1) == pytest.approx(1.0 / 0.886226925452758, abs=0.25)


def test_drivers_share_their_clock():
    pair = inverse_stable_pair(0.5, 1e-2, 1.0, seed=1)
    a, b = make_drivers(pair, seed=1, n_noise=2)
    np.testing.assert_array_equal(a.e.values, b.e.values)
    assert not np.array_equal(a.b_of_e.values, b.b_of_e.values)
    with pytest.raises(ConfigurationError):
        make_drivers(pair, seed=1, n_noise=0)


def test_driver_restrict():
    drv = make_driver(identity_pair(DYADIC, 1.0), seed=3)
    half = drv.restrict(0.5)
    assert half.grid[-1] == 0.5
    np.testing.assert_array_equal(half.b_of_e.values, drv.b_of_e.values[: half.grid.size])
    with pytest.raises(ConfigurationError):
        drv.restrict(0.0)


def test_driver_batch_validation():
    with pytest.raises(ConfigurationError):
        DriverBatch.from_drivers([])
    a = make_driver(identity_pair(DYADIC, 1.0), seed=0)
    b = make_driver(identity_pair(2 * DYADIC, 1.0), seed=0)
    with pytest.raises(ConfigurationError):
        DriverBatch.from_drivers([a, b])
    batch = DriverBatch.from_drivers([a, a])
    assert len(batch) == 2
    assert batch.b_of_e.shape == batch.e.shape == (2, a.grid.size)
    assert np.all(batch.clock[:, 0] == 0.0)
