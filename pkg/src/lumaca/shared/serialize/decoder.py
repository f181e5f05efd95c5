from __future__ import annotations

import json
from typing import TYPE_CHECKING, Any

if TYPE_CHECKING:
    from lumaca.path_calculus.cadlag import CadlagPath
    from lumaca.timechange.paths import MonotonePath


class LumacaJSONDecoder(json.JSONDecoder):
    """JSON decoder that rebuilds path envelopes written by the encoder."""

    def __init__(self, *args: Any, **kwargs: Any) -> None:
        super().__init__(object_hook=self._decode_object, *args, **kwargs)

    def _decode_object(self, data: dict[str, Any]) -> Any:
        if not {"grid", "values", "interp"} <= data.keys():
            return data

        match data.get("kind"):
            case "monotone":
                return path_from_dict(data)
            case "cadlag":
                return path_from_dict(data)
            case _:
                return data


def path_from_dict(data: dict[str, Any]) -> MonotonePath | CadlagPath:
    """
    Rebuild a path from its envelope ``{grid, values, interp[, jumps]}``.

    Envelopes without ``kind`` are read as monotone paths unless they carry
    jump records.
    """
    kind = data.get("kind")
    if kind is None:
        kind = "cadlag" if "jumps" in data else "monotone"

    match kind:
        case "monotone":
            from lumaca.timechange.paths import MonotonePath

            return MonotonePath(
                grid=data["grid"],
                values=data["values"],
                interp=data["interp"],
            )
        case "cadlag":
            from lumaca.path_calculus.cadlag import CadlagPath

            jumps = {int(i): float(v) for i, v in data.get("jumps", [])}
            return CadlagPath(
                grid=data["grid"],
                values=data["values"],
                jumps=jumps,
                interp=data["interp"],
            )
        case _:
            msg = f"unknown path kind: {kind!r}"
            raise ValueError(msg)


def loads(text: str) -> Any:
    return json.loads(text, cls=LumacaJSONDecoder)
