from __future__ import annotations

import math

import numpy as np
import pytest
import scipy.special

from lumaca.exceptions import (
    AccuracyError,
    ConfigurationError,
    SpecialFunctionDomainError,
)
from lumaca.special_fn import (
    MittagLefflerParams,
    fractional_integral,
    gamma_fn,
    mittag_leffler,
    mittag_leffler_with_error,
    product_trapezoid_weights,
)


def _ml(beta, z, **kwargs):
    return mittag_leffler(MittagLefflerParams(beta=beta, z=z, **kwargs))


# ------- mittag-leffler

@pytest.mark.parametrize("z", [-20.0, -1.0, 0.0, 0.5, 3.0])
def test_order_one_is_the_exponential(z):
    value, err, branch = mittag_leffler_with_error(MittagLefflerParams(1.0, z))
    assert value == pytest.approx(math.exp(z), rel=1e-15)
    assert branch == "exp"
    assert err == 0.0


@pytest.mark.parametrize("z", [-10.0, -3.0, -1.0, -0.2, 0.5, 2.0])
def test_order_one_half_is_a_scaled_erfc(z):
    # E_{1/2}(z) = exp(z**2) erfc(-z)
    assert _ml(0.5, z) == pytest.approx(scipy.special.erfcx(-z), rel=1e-10)


def test_reference_value():
    assert _ml(0.5, -1.0) == pytest.approx(0.42758357615580705, rel=1e-12)


def test_branches():
    assert mittag_leffler_with_error(MittagLefflerParams(0.5, -1.0))[2] == "series"
    value, err, branch = mittag_leffler_with_error(MittagLefflerParams(0.5, -30.0))
    assert branch == "asymptotic"
    assert err <= 1e-12
    assert value == pytest.approx(scipy.special.erfcx(30.0), rel=1e-10)
    assert mittag_leffler_with_error(MittagLefflerParams(0.3, 0.0)) == (1.0, 0.0, "series")


@pytest.mark.parametrize("beta", [0.3, 0.7, 0.9])
def test_negative_axis_is_positive_and_decreasing(beta):
    values = [_ml(beta, -x) for x in (0.5, 3.0, 7.0, 20.0, 45.0)]
    assert all(v > 0.0 for v in values)
    assert all(a > b for a, b in zip(values, values[1:]))


def test_parameter_validation():
    with pytest.raises(ConfigurationError):
        MittagLefflerParams(beta=0.0, z=1.0)
    with pytest.raises(ConfigurationError):
        MittagLefflerParams(beta=1.5, z=1.0)
    with pytest.raises(ConfigurationError):
        MittagLefflerParams(beta=0.5, z=1.0, series_tol=0.0)
    with pytest.raises(ConfigurationError):
        MittagLefflerParams(beta=0.5, z=1.0, max_terms=0)
    with pytest.raises(SpecialFunctionDomainError):
        MittagLefflerParams(beta=0.5, z=-50.5)
    with pytest.raises(SpecialFunctionDomainError):
        MittagLefflerParams(beta=0.5, z=float("nan"))


@pytest.mark.parametrize("beta", [0.3, 0.5])
def test_overflow_is_a_domain_error(beta):
    with pytest.raises(SpecialFunctionDomainError):
        _ml(beta, 50.0)


def test_exhausted_series_reports_its_accuracy():
    with pytest.raises(AccuracyError) as info:
        _ml(0.5, 3.0, max_terms=5)
    assert info.value.achieved > 0.0


# ------- gamma

def test_gamma_fn():
    assert gamma_fn(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-14)
    assert gamma_fn(5.0) == pytest.approx(24.0)
    for bad in (0.0, -1.0, float("nan"), 200.0):
        with pytest.raises(SpecialFunctionDomainError):
            gamma_fn(bad)


# ------- fractional integrals

@pytest.mark.parametrize("beta", [0.25, 0.5, 1.0])
def test_fractional_integral_of_polynomials(beta):
    t = 1.7
    one = fractional_integral(np.ones_like, beta, t)
    assert one == pytest.approx(t**beta / gamma_fn(beta + 1.0), rel=1e-9)
    ramp = fractional_integral(lambda r: r, beta, t)
    assert ramp == pytest.approx(t ** (beta + 1.0) / gamma_fn(beta + 2.0), rel=1e-9)
    square = fractional_integral(lambda r: r**2, beta, t)
    assert square == pytest.approx(
        2.0 * t ** (beta + 2.0) / gamma_fn(beta + 3.0), rel=1e-4
    )


def test_fractional_integral_converges_at_second_order():
    exact = 2.0 / gamma_fn(3.5)
    coarse = abs(fractional_integral(lambda r: r**2, 0.5, 1.0, nodes=32) - exact)
    fine = abs(fractional_integral(lambda r: r**2, 0.5, 1.0, nodes=128) - exact)
    assert fine < coarse / 8.0


def test_fractional_integral_validation():
    assert fractional_integral(np.ones_like, 0.5, 0.0) == 0.0
    with pytest.raises(ConfigurationError):
        fractional_integral(np.ones_like, 0.0, 1.0)
    with pytest.raises(ConfigurationError):
        fractional_integral(np.ones_like, 0.5, 1.0, nodes=8)
    with pytest.raises(ConfigurationError):
        fractional_integral(np.ones_like, 0.5, -1.0)


def test_product_trapezoid_weights_integrate_the_kernel():
    nodes = np.linspace(0.0, 2.0, 41)
    w = product_trapezoid_weights(nodes, 0.3, 2.0)
    assert w.sum() == pytest.approx(2.0**0.3 / 0.3, rel=1e-12)
    assert np.all(w > 0.0)
