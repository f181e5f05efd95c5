from __future__ import annotations

from lumaca.shared.serialize.decoder import LumacaJSONDecoder, loads, path_from_dict
from lumaca.shared.serialize.encoder import LumacaJSONEncoder, dumps

__all__ = [
    "LumacaJSONDecoder",
    "LumacaJSONEncoder",
    "dumps",
    "loads",
    "path_from_dict",
]
