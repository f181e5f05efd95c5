"""Counter-based random streams.

Every simulated path owns a generator keyed by ``(seed, stream, index)`` so
that a path's draws never depend on thread scheduling or on how many other
paths were simulated alongside it.
"""

from __future__ import annotations

import enum
from typing import TYPE_CHECKING

import numpy as np

from lumaca.exceptions import ConfigurationError

if TYPE_CHECKING:
    from lumaca.typing import FloatArray

__all__ = [
    "CHUNK",
    "Stream",
    "chunked_draws",
    "path_generator",
    "validate_seed",
]

# draws are always taken in blocks of this size
CHUNK = 1024

_SEED_LIMIT = 1 << 64
_INDEX_LIMIT = 1 << 48


class Stream(enum.IntEnum):
    """Independent sub-streams of a base seed."""

    SUBORDINATOR = 1
    BROWNIAN = 2
    CLOCK_SCALE = 3
    TARGET = 4
    FIXTURE = 5


def validate_seed(seed: int) -> int:
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        msg = f"seed must be an unsigned 64-bit integer, got {seed!r}"
        raise ConfigurationError(msg, key="seed")
    seed = int(seed)
    if not 0 <= seed < _SEED_LIMIT:
        msg = f"seed must be an unsigned 64-bit integer, got {seed}"
        raise ConfigurationError(msg, key="seed")
    return seed


def path_generator(
        seed: int,
        stream: Stream,
        index: int = 0,
) -> np.random.Generator:
    """
    Generator for one path of one stream.

    Parameters
    ----------
    seed
        Base seed of the run (unsigned 64-bit).
    stream
        Which quantity the draws feed.
    index
        Path index inside the ensemble.

    Returns
    -------
    numpy.random.Generator
        A Philox generator whose key is ``seed << 64 | stream << 48 | index``.
    """
    seed = validate_seed(seed)
    index = int(index)
    if not 0 <= index < _INDEX_LIMIT:
        msg = f"path index out of range: {index}"
        raise ConfigurationError(msg, key="index")
    key = (seed << 64) | (int(stream) << 48) | index
    return np.random.Generator(np.random.Philox(key=key))


def chunked_draws(
        rng: np.random.Generator,
        n: int,
        draw: str = "standard_normal",
) -> FloatArray:
    """
    Draw ``n`` variates in blocks of ``CHUNK``.

    The first ``n`` values are the same whatever ``n`` is, so extending a path
    later only appends draws.
    """
    if n <= 0:
        return np.empty(0, dtype=np.float64)
    sampler = getattr(rng, draw)
    n_chunks = -(-n // CHUNK)
    out = np.concatenate([sampler(size=CHUNK) for _ in range(n_chunks)])
    return out[:n]
