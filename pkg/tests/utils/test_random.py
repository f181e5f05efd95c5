from __future__ import annotations

import numpy as np
import pytest

import lumaca as lm
from lumaca.exceptions import ConfigurationError
from lumaca.utils.random import CHUNK, Stream, chunked_draws, path_generator, validate_seed
from lumaca.utils.show_versions import version_info


# ------- streams

def test_generators_are_keyed():
    a = path_generator(7, Stream.BROWNIAN, 3).standard_normal(4)
    b = path_generator(7, Stream.BROWNIAN, 3).standard_normal(4)
    np.testing.assert_array_equal(a, b)
    for other in (
        path_generator(8, Stream.BROWNIAN, 3),
        path_generator(7, Stream.SUBORDINATOR, 3),
        path_generator(7, Stream.BROWNIAN, 4),
    ):
        assert not np.array_equal(a, other.standard_normal(4))


def test_chunked_draws_extend_without_changing_the_prefix():
    short = chunked_draws(path_generator(1, Stream.FIXTURE), 10)
    long = chunked_draws(path_generator(1, Stream.FIXTURE), CHUNK + 10)
    np.testing.assert_array_equal(long[:10], short)
    assert long.shape == (CHUNK + 10,)
    assert chunked_draws(path_generator(1, Stream.FIXTURE), 0).size == 0

    u = chunked_draws(path_generator(1, Stream.FIXTURE), 5, draw="uniform")
    assert np.all((u >= 0) & (u < 1))
    # samplers only ever see a size, never a positional parameter
    e = chunked_draws(path_generator(1, Stream.FIXTURE), 4000, draw="exponential")
    assert e.mean() == pytest.approx(1.0, abs=0.1)


@pytest.mark.parametrize("seed", [-1, 2**64, 1.5, True, "7"])
def test_invalid_seeds(seed):
    with pytest.raises(ConfigurationError):
        validate_seed(seed)


def test_invalid_index():
    with pytest.raises(ConfigurationError):
        path_generator(0, Stream.TARGET, -1)
    assert validate_seed(np.uint64(2**64 - 1)) == 2**64 - 1


# ------- versions

def test_version_info(capsys):
    info = version_info()
    assert set(info) >= {"lumaca", "numpy", "scipy", "polars", "mpmath", "rich", "python"}
    lm.show_versions()
    assert "Required dependencies" in capsys.readouterr().out
