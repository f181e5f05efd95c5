from __future__ import annotations

import pytest

import lumaca as lm
from lumaca.utils.parallel import batch_ranges, map_batches


# ------- options

def test_defaults():
    assert lm.Config.threads() == 1
    assert lm.Config.batch_size() == 256
    assert lm.Config.divergence_bound() == 1e15
    assert lm.Config.condition_bound() == 1e12
    assert lm.Config.sync_atol("exact") == 1e-12
    assert lm.Config.sync_atol() == 1e-9


def test_context_restores_the_previous_state():
    lm.Config.set_batch_size(32)
    with lm.Config(batch_size=4, threads=2, divergence_bound=10.0):
        assert lm.Config.batch_size() == 4
        assert lm.Config.threads() == 2
        assert lm.Config.divergence_bound() == 10.0
    assert lm.Config.batch_size() == 32
    assert lm.Config.threads() == 1
    assert lm.Config.divergence_bound() == 1e15


def test_decorator():
    @lm.Config(condition_bound=2.0)
    def bound():
        return lm.Config.condition_bound()

    assert bound() == 2.0
    assert lm.Config.condition_bound() == 1e12


def test_threads_from_the_environment(monkeypatch):
    monkeypatch.setenv("THREADS", "3")
    assert lm.Config.threads() == 3
    monkeypatch.setenv("THREADS", "zero")
    with pytest.raises(lm.exceptions.ConfigurationError, match="THREADS"):
        lm.Config.threads()


@pytest.mark.parametrize(
    "option",
    [
        {"threads": 0},
        {"batch_size": 0},
        {"divergence_bound": -1.0},
        {"sync_atol_exact": 0.0},
    ],
)
def test_invalid_options(option):
    with pytest.raises(lm.exceptions.ConfigurationError):
        lm.Config(**option)


def test_unknown_option():
    with pytest.raises(AttributeError):
        lm.Config(colour="red")


def test_save_and_load(tmp_path):
    lm.Config.set_batch_size(8).set_threads(2)
    saved = lm.Config.save(if_set=True)
    assert lm.Config.state(if_set=True) == {"THREADS": "2", "batch_size": 8}

    lm.Config.restore_defaults()
    lm.Config.load(saved)
    assert lm.Config.batch_size() == 8
    assert lm.Config.threads() == 2

    path = tmp_path / "config.json"
    lm.Config.save_to_file(path)
    lm.Config.restore_defaults()
    lm.Config.load_from_file(path)
    assert lm.Config.batch_size() == 8

    with pytest.raises(ValueError):
        lm.Config.load("not json")


# ------- batches

def test_batch_ranges():
    assert batch_ranges(5, 2) == [range(0, 2), range(2, 4), range(4, 5)]
    assert batch_ranges(0, 2) == []
    with lm.Config(batch_size=3):
        assert len(batch_ranges(7)) == 3


def test_map_batches_keeps_order():
    def squares(batch):
        return [i * i for i in batch]

    serial = map_batches(squares, 10, batch_size=3, threads=1)
    threaded = map_batches(squares, 10, batch_size=3, threads=4)
    assert serial == threaded == [[0, 1, 4], [9, 16, 25], [36, 49, 64], [81]]
