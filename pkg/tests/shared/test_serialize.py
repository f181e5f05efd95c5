from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np
import pytest

from lumaca.path_calculus import CadlagPath
from lumaca.shared.serialize import dumps, loads, path_from_dict
from lumaca.shared.serialize.fingerprint import combine_ordered, digest
from lumaca.timechange import MonotonePath


# ------- encoder

def test_dumps_is_deterministic():
    a = dumps({"b": 1, "a": [1.5, 2]})
    b = dumps({"a": [1.5, 2], "b": 1})
    assert a == b
    assert a.endswith("\n")
    assert a.index('"a"') < a.index('"b"')


def test_dumps_converts_numpy_and_paths():
    text = dumps(
        {
            "f": np.float64(0.25),
            "i": np.int64(3),
            "flag": np.bool_(True),
            "arr": np.arange(3.0),
            "where": Path("out") / "run",
            "names": {"b", "a"},
        }
    )
    data = json.loads(text)
    assert data == {
        "f": 0.25,
        "i": 3,
        "flag": True,
        "arr": [0.0, 1.0, 2.0],
        "where": "out/run",
        "names": ["a", "b"],
    }


def test_non_finite_floats_stay_strict_json():
    text = dumps({"inf": math.inf, "nested": [np.float64(-math.inf), math.nan]})
    data = json.loads(text)
    assert data == {"inf": "inf", "nested": ["-inf", "nan"]}


def test_unknown_objects_are_rejected():
    with pytest.raises(TypeError):
        dumps({"x": object()})


# ------- decoder

def test_monotone_path_envelope():
    path = MonotonePath([0.0, 0.5, 1.0], [0.0, 0.0, 2.0], "step")
    back = loads(dumps(path))
    assert isinstance(back, MonotonePath)
    assert back == path


def test_cadlag_path_envelope_keeps_jumps():
    path = CadlagPath([0.0, 1.0, 2.0], [0.0, 1.0, 3.0], jumps={2: 1.5})
    back = loads(dumps({"solution": path, "note": "x"}))
    assert back["note"] == "x"
    assert back["solution"] == path
    assert back["solution"].jumps == {2: 1.5}


def test_envelope_without_kind():
    data = {"grid": [0.0, 1.0], "values": [0.0, 1.0], "interp": "linear"}
    assert isinstance(path_from_dict(data), MonotonePath)
    assert isinstance(path_from_dict({**data, "jumps": []}), CadlagPath)
    with pytest.raises(ValueError, match="unknown path kind"):
        path_from_dict({**data, "kind": "other"})


# ------- fingerprints

def test_digests():
    a = digest(b"abc", person=b"artifact")
    assert len(a) == 32
    assert a == digest(b"abc", person=b"artifact")
    assert a != digest(b"abc", person=b"config")
    b = digest(b"abd")
    assert combine_ordered([a, b]) != combine_ordered([b, a])
