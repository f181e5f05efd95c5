from __future__ import annotations

import dataclasses
import enum
import json
import math
from pathlib import PurePath
from typing import Any

import numpy as np


class LumacaJSONEncoder(json.JSONEncoder):
    """
    JSON encoder for the records and paths lumaca writes.

    Paths and records expose ``to_dict()``; numpy scalars and arrays are
    converted to plain Python values. Non-finite floats are written as
    strings so that every report stays strict JSON.
    """

    TYPE_KEY = "__T__"

    def encode(self, obj: Any) -> str:
        return super().encode(_clean_floats(obj))

    def iterencode(self, obj: Any, _one_shot: bool = False) -> Any:
        return super().iterencode(_clean_floats(obj), _one_shot)

    def default(self, obj: Any) -> Any:
        """Convert non-JSON-serializable objects to serializable format."""
        match obj:
            case np.bool_():
                return bool(obj)
            case np.integer():
                return int(obj)
            case np.floating():
                return _finite_or_str(float(obj))
            case np.ndarray():
                return _clean_floats(obj.tolist())
            case PurePath():
                return obj.as_posix()
            case enum.Enum():
                return obj.value
            case _ if hasattr(obj, "to_dict"):
                return _clean_floats(obj.to_dict())
            case _ if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
                return _clean_floats(
                    {f.name: getattr(obj, f.name) for f in dataclasses.fields(obj)}
                )
            case set() | frozenset():
                return sorted(obj, key=str)
            case _:
                return super().default(obj)


def _finite_or_str(value: float) -> float | str:
    if math.isfinite(value):
        return value
    return repr(float(value))


def _clean_floats(item: Any) -> Any:
    """Recursively replace non-finite floats, which ``json`` would emit bare."""
    if isinstance(item, float):
        return _finite_or_str(item)
    if isinstance(item, (list, tuple)):
        return [_clean_floats(i) for i in item]
    if isinstance(item, dict):
        return {k: _clean_floats(v) for k, v in item.items()}
    return item


def dumps(obj: Any, *, indent: int | None = 2) -> str:
    """Deterministic JSON text: sorted keys and a trailing newline."""
    return (
        json.dumps(
            obj,
            cls=LumacaJSONEncoder,
            sort_keys=True,
            indent=indent,
            allow_nan=False,
        )
        + "\n"
    )
