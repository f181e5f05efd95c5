from __future__ import annotations

import numpy as np
import pytest

from lumaca.exceptions import UnsupportedBracketError
from lumaca.path_calculus import (
    CadlagPath,
    ItoIntegrands,
    brownian_path,
    calculus_rules,
    indicator_path,
    jump_correction,
    quadratic_variation,
    verify_drift_reclocking,
    verify_first_cov,
    verify_product_rule,
    verify_qv_composition,
    verify_second_cov,
    verify_tc_ito,
)
from lumaca.sde_engine import make_driver
from lumaca.timechange import (
    TimeChangePair,
    identity_pair,
    inverse_stable_pair,
    step_time_change,
    uniform_grid,
)

# dyadic steps keep identity grids exact in binary
DYADIC = 2.0**-8


def _one(x):
    return np.ones_like(np.asarray(x, dtype=np.float64))


def _zero(x):
    return np.zeros_like(np.asarray(x, dtype=np.float64))


def _stable_drivers(step, n, seed=31, beta=0.9):
    return [
        make_driver(inverse_stable_pair(beta, step, 1.0, seed=seed, index=i), seed=seed, index=i)
        for i in range(n)
    ]


@pytest.fixture(scope="module")
def stable_driver():
    pair = inverse_stable_pair(0.5, 1e-3, 1.0, seed=21)
    return make_driver(pair, seed=21)


@pytest.fixture(scope="module")
def step_fixture():
    step = 0.01
    e = step_time_change(1.0, step, 2.0)
    pair = TimeChangePair.from_time_change(e, step)
    z = brownian_path(uniform_grid(step, 1.0), seed=5)
    return pair, z


# ------- change of variables

def test_first_cov_constant_integrand_is_exact(stable_driver):
    z = stable_driver.inner_b
    res = verify_first_cov(CadlagPath.constant(z.grid, 1.0), z, stable_driver.pair)
    assert res.sup <= 1e-9
    assert res.name == "first_cov"
    assert float(res) == res.sup


def test_second_cov_constant_integrand_is_exact(stable_driver):
    z = stable_driver.inner_b
    k = CadlagPath.constant(stable_driver.grid, 1.0)
    res = verify_second_cov(k, z, stable_driver.pair)
    assert res.sup <= 1e-9


def test_first_cov_residual_shrinks_with_the_step():
    def mean_residual(step):
        out = []
        for i in range(10):
            drv = make_driver(inverse_stable_pair(0.9, step, 1.0, seed=3, index=i), seed=3, index=i)
            z = drv.inner_b
            out.append(verify_first_cov(z, z, drv.pair).sup)
        return float(np.mean(out))

    assert mean_residual(1e-3) < mean_residual(2e-2)


def test_first_cov_fails_without_synchronization(step_fixture):
    pair, z = step_fixture
    h = indicator_path(z.grid, 0.5, closed="left")
    res = verify_first_cov(h, z, pair)
    start = int(np.argmax(h.values > 0))
    assert np.all(res.rhs.values == 0.0)
    assert res.sup == pytest.approx(abs(z.values[-1] - z.values[start]))


def test_qv_composition_fails_without_synchronization(step_fixture):
    pair, z = step_fixture
    res = verify_qv_composition(z, pair)
    qv = quadratic_variation(z).values[-1]
    assert res.sup == pytest.approx(abs(z.values[-1] ** 2 - qv))


def test_qv_composition_holds_for_the_identity_clock():
    drv = make_driver(identity_pair(DYADIC, 1.0), seed=4)
    res = verify_qv_composition(drv.inner_b, drv.pair)
    assert res.sup <= 1e-9


def test_qv_composition_on_an_inverse_stable_clock():
    def mean_residual(step):
        return float(np.mean([
            verify_qv_composition(d.inner_b, d.pair).sup
            for d in _stable_drivers(step, 10)
        ]))

    fine = mean_residual(2.0**-12)
    assert fine < 0.3
    assert fine < mean_residual(2.0**-6)


# ------- time-changed ito formula

def test_tc_ito_is_exact_for_linear_functions(stable_driver):
    res = verify_tc_ito(
        ItoIntegrands(a=0.3, f=0.2, g=1.0),
        stable_driver.inner_b,
        stable_driver.pair,
        lambda x: x,
        _one,
        _zero,
    )
    assert res.sup <= 1e-9


def test_tc_ito_for_squares_on_the_classical_clock():
    rms = []
    for i in range(8):
        drv = make_driver(identity_pair(2.0**-13, 1.0), seed=9, index=i)
        res = verify_tc_ito(
            ItoIntegrands(g=1.0),
            drv.inner_b,
            drv.pair,
            lambda x: x**2,
            lambda x: 2.0 * x,
            lambda x: 2.0 * _one(x),
        )
        rms.append(res.rms)
    assert np.mean(rms) < 0.02


def test_tc_ito_for_exp_on_an_inverse_stable_clock():
    rms = []
    for drv in _stable_drivers(2.0**-12, 6):
        res = verify_tc_ito(
            ItoIntegrands(g=1.0), drv.inner_b, drv.pair, np.exp, np.exp, np.exp
        )
        # X = B o E - B(E_0), so the left side is exp(X) - 1 in closed form
        np.testing.assert_allclose(
            res.lhs.values, np.expm1(drv.b_of_e.values), rtol=1e-10, atol=1e-12
        )
        rms.append(res.rms)
    assert np.mean(rms) < 0.3


def test_tc_ito_needs_a_continuous_clock(step_fixture):
    pair, z = step_fixture
    with pytest.raises(UnsupportedBracketError):
        verify_tc_ito(ItoIntegrands(g=1.0), z, pair, lambda x: x, _one, _zero)


def test_jump_correction():
    g = uniform_grid(0.25, 1.0)
    x = CadlagPath(g, [0.0, 0.0, 2.0, 2.0, 3.0], jumps={2: 0.0, 4: 2.0})
    out = jump_correction(lambda v: v**2, lambda v: 2.0 * v, x)
    # f(x) - f(x-) - f'(x-) dx is dx**2 for squares
    np.testing.assert_allclose(out.values, [0.0, 0.0, 4.0, 4.0, 5.0])
    smooth = CadlagPath(g, g, interp="linear")
    assert np.all(jump_correction(np.exp, np.exp, smooth).values == 0.0)


def test_drift_reclocking_on_the_classical_clock():
    res = verify_drift_reclocking(0.7, identity_pair(DYADIC, 1.0))
    assert res.sup <= 1e-9
    np.testing.assert_allclose(res.lhs.values, 0.7 * res.lhs.grid, atol=1e-12)


def test_drift_reclocking_reports_a_finite_residual(stable_driver):
    res = verify_drift_reclocking(1.0, stable_driver.pair)
    assert np.isfinite(res.sup)
    assert res.rms <= res.sup


# ------- calculus rules

@pytest.mark.parametrize("seed", [1, 2])
def test_product_rule_is_exact_on_a_grid(seed):
    g = uniform_grid(1e-3, 1.0)
    y = brownian_path(g, seed=seed)
    z = brownian_path(g, seed=seed, index=1)
    assert verify_product_rule(y, z).sup <= 1e-10


def test_calculus_rules_on_the_classical_clock():
    step = 2.0**-13
    drv = make_driver(identity_pair(step, 1.0), seed=12)
    rules = calculus_rules(drv)
    assert rules.m_e == pytest.approx(step, rel=1e-6)
    assert abs(rules.m_be) < 0.01
    assert abs(rules.e_be) < 0.01
    assert rules.be_be_minus_e < 0.1
    assert set(rules.to_dict()) == {"m_e", "m_be", "e_be", "be_be_minus_e"}


def test_calculus_rules_on_an_inverse_stable_clock():
    step = 2.0**-12
    gaps = []
    for drv in _stable_drivers(step, 6):
        rules = calculus_rules(drv)
        e = drv.pair.e.values
        # [m, E] telescopes to step * (E_1 - E_0) on a uniform grid
        assert rules.m_e == pytest.approx(step * (e[-1] - e[0]), rel=1e-6)
        assert rules.m_be <= step * np.max(np.abs(drv.b_of_e.values)) * (1 + 1e-9) + 1e-12
        assert rules.e_be < 0.15
        gaps.append(rules.be_be_minus_e)
    assert np.mean(gaps) < 0.3
