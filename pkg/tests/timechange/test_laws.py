from __future__ import annotations

import math

import numpy as np
import pytest

from lumaca.exceptions import ConfigurationError
from lumaca.timechange import (
    estimate_scaling_law,
    flat_fraction,
    inverse_stable_pair,
    sample_clock,
    sample_clock_exact,
)
from lumaca.utils.config import Config


def test_sample_clock_rows_are_ensemble_paths():
    times = np.array([0.5, 1.0])
    sample = sample_clock(0.5, times, 4, 1e-2, seed=3)
    assert sample.shape == (4, 2)
    pair = inverse_stable_pair(0.5, 1e-2, 1.0, 3, 2)
    np.testing.assert_allclose(sample[2], pair.e(times))


def test_sample_clock_does_not_depend_on_threads():
    times = np.array([0.25, 1.0])
    with Config(threads=1):
        one = sample_clock(0.6, times, 12, 1e-2, seed=8)
    with Config(threads=3, batch_size=2):
        three = sample_clock(0.6, times, 12, 1e-2, seed=8)
    np.testing.assert_array_equal(one, three)


@pytest.mark.parametrize("beta", [0.3, 0.5, 0.8])
def test_exact_marginal_mean(beta):
    sample = sample_clock_exact(beta, [1.0], 20_000, seed=1)[:, 0]
    target = 1.0 / math.gamma(1.0 + beta)
    se = sample.std(ddof=1) / math.sqrt(sample.size)
    assert abs(sample.mean() - target) <= 5.0 * se


def test_exact_marginals_scale_as_a_power():
    times = np.array([0.1, 0.4, 1.6])
    means = sample_clock_exact(0.4, times, 500, seed=2).mean(axis=0)
    slope = np.polyfit(np.log(times), np.log(means), 1)[0]
    assert slope == pytest.approx(0.4, abs=1e-9)


def test_exact_marginals_validate_beta():
    with pytest.raises(ConfigurationError):
        sample_clock_exact(1.0, [1.0], 10, seed=0)


@pytest.mark.slow
@pytest.mark.parametrize("beta", [0.3, 0.5, 0.8])
def test_scaling_law_slope(beta):
    law = estimate_scaling_law(beta, [0.25, 0.5, 1.0], 2_000, 1e-3, seed=5)
    assert law.slope == pytest.approx(beta, abs=0.05)
    assert law.c > 0
    assert law.to_frame().columns == ["t", "mean", "std_error", "fit"]


def test_scaling_law_needs_two_positive_times():
    with pytest.raises(ConfigurationError):
        estimate_scaling_law(0.5, [1.0], 10, 1e-2, seed=0)
    with pytest.raises(ConfigurationError):
        estimate_scaling_law(0.5, [0.0, 1.0], 10, 1e-2, seed=0)


def test_inverse_stable_clock_is_mostly_flat():
    fractions = [
        flat_fraction(inverse_stable_pair(0.5, 1e-4, 1.0, 4, i).e)
        for i in range(100)
    ]
    assert np.mean(fractions) > 0.9
